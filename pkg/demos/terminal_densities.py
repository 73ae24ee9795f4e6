"""Terminal densities and demand folding.

A deployment area is described by a normalized terminal density f and a
total throughput theta. When the throughput demand varies over the area
instead, the pair (f_raw, demand) folds into an equivalent (f, theta)
with the same load profile f * theta pointwise.
"""

import numpy as np

from backhaulopt import (
    DemandField,
    DensityField,
    Domain,
    FunctionSpec,
    expected_terminals,
    fold_demand,
)

dom = Domain.interval(-1.0, 1.0, 1001)
f = DensityField.from_spec(
    FunctionSpec("truncated_normal", {"mu": 0.0, "sigma": 0.6, "a": -1.0, "b": 1.0}),
    2.0,
    dom,
)

print("terminal density on [-1, 1], theta =", f.throughput)
print(f"  mass            {f.integrate():.6f}")
print(f"  centroid        {f.centroid()[0]:+.6f}")
print(f"  spread          {f.spread():.6f}")
print(f"  mass in [0, 1]  {f.integrate((0.0, 1.0)):.6f}")

for n in (100, 10_000):
    count = expected_terminals(f, (-0.25, 0.25), n)
    print(f"  of {n:>6} terminals, {count:8.1f} expected in [-0.25, 0.25]")

# demand that rises linearly across the area
demand = DemandField(
    dom,
    FunctionSpec("truncated_normal", {"mu": 0.0, "sigma": 0.6, "a": -1.0, "b": 1.0}),
    FunctionSpec("affine", {"slope": 0.8, "intercept": 2.0}),
)
folded = fold_demand(demand)

print("\nfolding a linear demand profile 2.0 + 0.8 x:")
print(f"  folded theta    {folded.throughput:.6f}")
print(f"  folded mass     {folded.integrate():.6f}")
print(f"  centroid shift  {f.centroid()[0]:+.6f} -> {folded.centroid()[0]:+.6f}")

x = np.array([-0.5, 0.0, 0.5])
raw = DensityField.from_spec(demand.terminal_density, 1.0, dom)
lhs = folded.eval(x) * folded.throughput
rhs = raw.eval(x) * (2.0 + 0.8 * x)
print("  load profile f * theta preserved at sample points:")
for xi, a, b in zip(x, lhs, rhs):
    print(f"    x = {xi:+.1f}: {a:.9f} vs {b:.9f}")
