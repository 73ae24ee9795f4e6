"""Transmission power model for a wireless network with microwave backhaul.

Every base station serves the terminals of its cell over access links and
exchanges the aggregate traffic with every other station over backhaul
links. Both link types use the free-space gain 1/d^2. Access links invert
the Shannon rate at the demanded throughput; backhaul links use the
low-SNR linearization of the rate, which makes their power proportional
to the traffic product of the two endpoint cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import DensityField, Domain

__all__ = [
    "RadioParams",
    "SingularGainError",
    "CellPartition",
    "TrafficVector",
    "PowerReport",
    "channel_gain",
    "intra_power_at",
    "cell_intra_power",
    "cell_traffic",
    "station_traffic",
    "inter_power",
    "total_power",
    "cells_in_region",
]


class SingularGainError(ValueError):
    """The free-space gain model diverges for coincident endpoints."""


@dataclass(frozen=True)
class RadioParams:
    """Link-budget constants: receiver noise power and per-unit-mass throughput."""

    noise_power: float
    throughput: float

    def __post_init__(self):
        if not self.noise_power > 0:
            raise ValueError("noise power must be positive")
        if not self.throughput > 0:
            raise ValueError("throughput must be positive")

    @property
    def shannon_factor(self) -> float:
        """Power multiplier 2**throughput - 1 from inverting the rate formula."""
        return math.pow(2.0, self.throughput) - 1.0


def _position(p, ndim: int) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(p, dtype=float))
    if arr.shape != (ndim,):
        raise ValueError(f"position must have {ndim} coordinate(s)")
    return arr


def _positions(p, ndim: int) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None] if ndim == 1 else arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != ndim:
        raise ValueError(f"positions must be an array of {ndim}-coordinate points")
    return arr


def channel_gain(a, b) -> float:
    """Free-space channel gain 1/d^2 between two points."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    d2 = float(np.sum((a - b) ** 2))
    if d2 == 0.0:
        raise SingularGainError("coincident endpoints have unbounded gain")
    return 1.0 / d2


def intra_power_at(bs, p, params: RadioParams) -> float:
    """Access-link power per unit terminal mass at location p.

    Inverts the Shannon rate: the power that sustains the demanded
    throughput over the gain 1/d^2 at noise level sigma^2.
    """
    bs = np.atleast_1d(np.asarray(bs, dtype=float))
    p = np.atleast_1d(np.asarray(p, dtype=float))
    d2 = float(np.sum((bs - p) ** 2))
    return params.noise_power * params.shannon_factor * d2


@dataclass
class CellPartition:
    """Assignment of every grid cell of a domain to one of K stations."""

    domain: Domain
    assignment: np.ndarray
    stations: int

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=int).reshape(
            self.domain.cell_counts
        )
        if self.stations < 1:
            raise ValueError("a partition needs at least one station")
        if self.assignment.size and (
            self.assignment.min() < 0 or self.assignment.max() >= self.stations
        ):
            raise ValueError("cell assignments must index a station")

    @staticmethod
    def single_cell(domain: Domain) -> "CellPartition":
        return CellPartition(domain, np.zeros(domain.cell_counts, dtype=int), 1)

    def mask(self, station: int) -> np.ndarray:
        """Boolean mask over grid cells owned by one station."""
        return self.assignment == station


def cells_in_region(domain: Domain, region) -> np.ndarray:
    """Mask of grid cells whose centers lie in an interval or rectangle."""
    centers = domain.cell_centers()
    if domain.ndim == 1:
        lo, hi = region
        mask = (centers >= lo) & (centers <= hi)
        return mask
    (xlo, xhi), (ylo, yhi) = region
    mask = (
        (centers[:, 0] >= xlo)
        & (centers[:, 0] <= xhi)
        & (centers[:, 1] >= ylo)
        & (centers[:, 1] <= yhi)
    )
    return mask.reshape(domain.cell_counts)


def cell_intra_power(bs, cell: np.ndarray, d: DensityField, params: RadioParams) -> float:
    """Access power integrated over one cell.

    `cell` is a boolean mask over the grid cells of the density domain.
    """
    cell = np.asarray(cell, dtype=bool).reshape(d.domain.cell_counts)
    p = _position(bs, d.domain.ndim)
    # Expand (x - p)^2 per grid cell; cell-level terms are tiny, so the
    # expansion loses no precision the way a station-level one would.
    moments = d.cell_second_moments()[cell] - 2.0 * sum(
        pk * m[cell] for pk, m in zip(p, d.cell_first_moments())
    ) + float(p @ p) * d.cell_masses()[cell]
    moment = float(np.maximum(moments, 0.0).sum())
    return params.noise_power * params.shannon_factor * moment


def cell_traffic(cell: np.ndarray, d: DensityField) -> float:
    """Aggregate traffic of one cell: throughput times its terminal mass."""
    cell = np.asarray(cell, dtype=bool).reshape(d.domain.cell_counts)
    return d.throughput * float(d.cell_masses()[cell].sum())


@dataclass(frozen=True)
class TrafficVector:
    """Per-station aggregate traffic and the network total."""

    per_station: np.ndarray
    total: float


def station_traffic(partition: CellPartition, d: DensityField) -> TrafficVector:
    """Traffic of every station's cell under a partition."""
    masses = np.bincount(
        partition.assignment.ravel(),
        weights=d.cell_masses().ravel(),
        minlength=partition.stations,
    )
    per_station = d.throughput * masses
    return TrafficVector(per_station, float(per_station.sum()))


def inter_power(m_i: float, m_j: float, m: float, d_ij: float, params: RadioParams) -> float:
    """Backhaul-link power between two stations.

    Uses the low-SNR linearization of the Shannon rate, under which the
    required power is proportional to the traffic share m_i * m_j / m and
    to the squared distance.
    """
    if not m > 0:
        raise ValueError("total traffic must be positive")
    if d_ij < 0:
        raise ValueError("distance must be nonnegative")
    return params.noise_power * d_ij * d_ij * m_i * m_j / m


@dataclass
class PowerReport:
    """Breakdown of the network transmission power for one configuration."""

    intra_per_cell: np.ndarray
    inter_per_pair: np.ndarray
    intra_total: float
    inter_total: float
    total: float


def total_power(
    positions, partition: CellPartition, d: DensityField, params: RadioParams
) -> PowerReport:
    """Total network power: access links plus all ordered backhaul pairs.

    The backhaul sum runs over ordered pairs, so each unordered pair of
    stations contributes twice. Coincident stations that both carry
    traffic raise SingularGainError; a station without traffic needs no
    backhaul link, so duplicates involving one are tolerated.
    """
    pos = _positions(positions, d.domain.ndim)
    K = partition.stations
    if pos.shape[0] != K:
        raise ValueError("one position per station is required")

    assign = partition.assignment.ravel()
    s0 = d.cell_masses().ravel()
    pc = pos[assign]
    cell_moments = (
        d.cell_second_moments().ravel()
        - 2.0
        * sum(pc[:, k] * m.ravel() for k, m in enumerate(d.cell_first_moments()))
        + np.sum(pc * pc, axis=1) * s0
    )
    intra = params.noise_power * params.shannon_factor * np.bincount(
        assign, weights=np.maximum(cell_moments, 0.0), minlength=K
    )

    traffic = d.throughput * np.bincount(assign, weights=s0, minlength=K)
    m = float(traffic.sum())
    if not m > 0:
        raise ValueError("total traffic must be positive")

    diff = pos[:, None, :] - pos[None, :, :]
    dist2 = np.sum(diff * diff, axis=-1)
    coincident = (dist2 == 0.0) & ~np.eye(K, dtype=bool)
    both_loaded = np.outer(traffic > 0, traffic > 0)
    if np.any(coincident & both_loaded):
        raise SingularGainError(
            "coincident stations with traffic on both ends"
        )
    inter = params.noise_power / m * np.outer(traffic, traffic) * dist2
    np.fill_diagonal(inter, 0.0)

    intra_total = float(intra.sum())
    inter_total = float(inter.sum())
    return PowerReport(
        intra_per_cell=intra,
        inter_per_pair=inter,
        intra_total=intra_total,
        inter_total=inter_total,
        total=intra_total + inter_total,
    )
