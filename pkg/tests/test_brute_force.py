import numpy as np
import pytest

from backhaulopt.brute_force import (
    brute_force_optimize,
    consistency_report,
    midpoint_total_power,
    naive_total_power,
)
from backhaulopt.density import DensityField, Domain, FunctionSpec
from backhaulopt.discrete_placement import voronoi_partition
from backhaulopt.power_model import RadioParams, total_power

PARAMS = RadioParams(noise_power=1.0, throughput=1.0)


def uniform_field(resolution=2001):
    return DensityField.from_spec(
        FunctionSpec("uniform", {}), 1.0, Domain.interval(0.0, 1.0, resolution)
    )


def normal_field():
    return DensityField.from_spec(FunctionSpec("normal", {"mu": 0.0, "sigma": 1.0}), 1.0)


class TestNaiveReference:
    def test_matches_main_path_1d(self):
        d = uniform_field()
        pos = np.array([0.25, 0.75])
        partition = voronoi_partition(pos, d)
        report = total_power(pos, partition, d, PARAMS)
        naive = naive_total_power(pos, partition.assignment.ravel(), d, PARAMS)
        assert naive == pytest.approx(7.0 / 48.0, abs=1e-10)
        assert abs(naive - report.total) <= 1e-12

    def test_matches_main_path_1d_normal(self):
        d = normal_field()
        pos = np.array([-1.1, 0.3, 1.8])
        partition = voronoi_partition(pos, d)
        report = total_power(pos, partition, d, PARAMS)
        naive = naive_total_power(pos, partition.assignment.ravel(), d, PARAMS)
        assert abs(naive - report.total) <= 1e-12 * max(1.0, abs(report.total))

    def test_matches_main_path_2d(self):
        d = DensityField.from_spec(
            FunctionSpec("normal", {"mu": (0.0, 0.0), "sigma": (1.0, 1.0)}),
            1.0,
            Domain.rectangle((-4.0, 4.0), (-4.0, 4.0), (41, 41)),
        )
        pos = np.array([[-1.0, -1.0], [0.0, 0.5], [1.2, -0.3]])
        partition = voronoi_partition(pos, d)
        report = total_power(pos, partition, d, PARAMS)
        naive = naive_total_power(pos, partition.assignment.ravel(), d, PARAMS)
        assert abs(naive - report.total) <= 1e-12 * max(1.0, abs(report.total))


class TestMidpointReference:
    def test_close_to_main_path(self):
        d = uniform_field()
        pos = np.array([0.25, 0.75])
        report = total_power(pos, voronoi_partition(pos, d), d, PARAMS)
        mid = midpoint_total_power(pos, d, PARAMS)
        # different quadrature: agreement is grid-level, not roundoff-level
        assert abs(mid - report.total) <= 1e-5
        assert abs(mid - report.total) > 0.0

    def test_position_order_irrelevant(self):
        d = normal_field()
        a = midpoint_total_power(np.array([-1.0, 1.0]), d, PARAMS)
        b = midpoint_total_power(np.array([1.0, -1.0]), d, PARAMS)
        assert a == b


class TestBruteForce:
    def test_single_station_uniform(self):
        d = uniform_field()
        res = brute_force_optimize(d, 1, PARAMS, np.linspace(0.0, 1.0, 101))
        assert res.positions[0] == 0.5
        assert res.power == pytest.approx(1.0 / 12.0, abs=1e-6)
        assert res.traffic.sum() == pytest.approx(1.0, abs=1e-12)

    def test_single_station_normal(self):
        d = normal_field()
        res = brute_force_optimize(d, 1, PARAMS, np.linspace(-8.0, 8.0, 81))
        assert res.positions[0] == 0.0

    def test_two_stations_beat_the_naive_layout(self):
        d = uniform_field()
        res = brute_force_optimize(d, 2, PARAMS, np.linspace(0.0, 1.0, 201))
        assert res.power < 7.0 / 48.0
        assert res.positions[0] < res.positions[1]
        # the optimal pair sits strictly inside the pure-quantizer layout
        assert 0.25 < res.positions[0] and res.positions[1] < 0.75

    def test_deterministic(self):
        d = uniform_field(501)
        cand = np.linspace(0.0, 1.0, 101)
        a = brute_force_optimize(d, 3, PARAMS, cand)
        b = brute_force_optimize(d, 3, PARAMS, cand)
        np.testing.assert_array_equal(a.positions, b.positions)
        assert a.power == b.power

    def test_not_beaten_by_random_tuples(self):
        d = normal_field()
        cand = np.linspace(-4.0, 4.0, 81)
        res = brute_force_optimize(d, 2, PARAMS, cand)
        rng = np.random.default_rng(13)
        for _ in range(50):
            pick = rng.choice(cand, size=2, replace=False)
            assert midpoint_total_power(pick, d, PARAMS) >= res.power - 1e-12

    def test_station_count_limits(self):
        d = uniform_field(101)
        cand = np.linspace(0.0, 1.0, 11)
        for K in (0, 4):
            with pytest.raises(ValueError):
                brute_force_optimize(d, K, PARAMS, cand)

    def test_candidate_count_limit(self):
        d = uniform_field(101)
        with pytest.raises(ValueError):
            brute_force_optimize(d, 2, PARAMS, np.linspace(0.0, 1.0, 402))

    def test_candidates_must_lie_inside(self):
        d = uniform_field(101)
        with pytest.raises(ValueError):
            brute_force_optimize(d, 1, PARAMS, np.array([0.5, 1.5]))

    def test_needs_enough_candidates(self):
        d = uniform_field(101)
        with pytest.raises(ValueError):
            brute_force_optimize(d, 3, PARAMS, np.array([0.2, 0.8]))

    def test_rejects_2d(self):
        d = DensityField.from_spec(
            FunctionSpec("uniform", {}),
            1.0,
            Domain.rectangle((0.0, 1.0), (0.0, 1.0), (11, 11)),
        )
        with pytest.raises(ValueError):
            brute_force_optimize(d, 1, PARAMS, np.linspace(0.1, 0.9, 5))


class TestConsistencyReport:
    def test_uniform_centered(self):
        d = DensityField.from_spec(
            FunctionSpec("uniform", {}), 1.0, Domain.interval(-1.0, 1.0, 2001)
        )
        rows = consistency_report(d, PARAMS, [2, 3], np.linspace(-1.0, 1.0, 101))
        assert [r.K for r in rows] == [2, 3]
        for r in rows:
            assert r.theta == 1.0
            assert r.dilation == 5.0
            assert r.f_spread == pytest.approx(1.0 / np.sqrt(3.0), abs=1e-9)
            assert r.continuum_spread == pytest.approx(5.0 / np.sqrt(3.0), abs=1e-6)
            assert r.discrete_spread >= 0.0
            assert r.ratio == pytest.approx(r.discrete_spread / r.f_spread, rel=1e-12)

    def test_high_throughput_stations_shadow_terminals(self):
        d = DensityField.from_spec(
            FunctionSpec("truncated_normal", {"mu": 0.0, "sigma": 1.0, "a": -1.0, "b": 1.0}),
            24.0,
            Domain.interval(-1.0, 1.0, 2001),
        )
        rows = consistency_report(
            d, RadioParams(1.0, 24.0), [1], np.linspace(-1.0, 1.0, 51)
        )
        assert rows[0].continuum_spread / rows[0].f_spread == pytest.approx(1.0, abs=1e-6)
        assert rows[0].dilation - 1.0 == pytest.approx(2.384185933124172e-07, rel=1e-9)

    def test_concentrated_density_collapses_spreads(self):
        dom = Domain.interval(-1.0, 1.0, 401)
        x = dom.axis(0)
        d = DensityField.from_values(dom, np.exp(-(x**2) / (2.0 * 0.003**2)), 1.0)
        rows = consistency_report(d, PARAMS, [1], np.linspace(-1.0, 1.0, 101))
        assert rows[0].discrete_spread <= 0.05
        assert rows[0].continuum_spread <= 0.05

    def test_station_count_list_limited(self):
        d = uniform_field(101)
        with pytest.raises(ValueError):
            consistency_report(d, PARAMS, [1, 2, 3, 3], np.linspace(0.1, 0.9, 21))

    def test_off_center_density_propagates_error(self):
        d = uniform_field(101)  # barycenter 0.5
        with pytest.raises(ValueError):
            consistency_report(d, PARAMS, [1], np.linspace(0.1, 0.9, 21))
