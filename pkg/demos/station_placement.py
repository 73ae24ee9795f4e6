"""Optimizing station positions for a finite station count.

The optimizer alternates nearest-station cell assignment with a
closed-form position update. The power trace is monotone, so whatever
iteration it stops at is the best configuration it has seen.
"""

import numpy as np

from backhaulopt import (
    DensityField,
    Domain,
    FunctionSpec,
    OptimizerConfig,
    RadioParams,
    optimize,
)

d = DensityField.from_spec(FunctionSpec("uniform", {}), 1.0, Domain.interval(0.0, 1.0, 2001))
params = RadioParams(noise_power=1.0, throughput=1.0)

print("uniform terminals on [0, 1]:")
for K in (1, 2, 3):
    sol = optimize(d, K, params)
    pos = ", ".join(f"{p:.4f}" for p in np.sort(sol.positions.ravel()))
    print(
        f"  K={K}: positions [{pos}], total {sol.report.total:.6f}, "
        f"{sol.iterations} iterations, converged={sol.converged}"
    )

sol = optimize(d, 2, params)
print("\ntrace for K=2 (first 6 entries):")
for k, value in enumerate(sol.trace[:6]):
    print(f"  iter {k}: {value:.9f}")
print(f"  ... settles at {sol.trace[-1]:.9f}")

# with the backhaul term switched off the optimizer reduces to the
# classical quantizer and lands on the equal-mass quantiles
quantizer = optimize(d, 2, params, OptimizerConfig(include_inter=False))
print("\nbackhaul off (pure quantizer):", np.sort(quantizer.positions.ravel()).round(4))
print("backhaul on (this model):      ", np.sort(sol.positions.ravel()).round(4))

gauss = DensityField.from_spec(FunctionSpec("normal", {"mu": 0.0, "sigma": 1.0}), 1.0)
sol_g = optimize(gauss, 3, params, OptimizerConfig(init="jitter", seed=1))
print("\ngaussian terminals, K=3:", np.sort(sol_g.positions.ravel()).round(4))
