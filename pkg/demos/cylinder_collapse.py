"""Shrinking cylinder under plain mean curvature flow.

A round cylinder of radius r in R^(n+1) stays round and its radius obeys
r' = -(n-1)/r, so r(t)^2 = r0^2 - 2(n-1)t and the curvature blows up at
T = r0^2/(2(n-1)) with |A|^2 = 1/(2(T-t)).  This script compares the
simulation against that closed form and runs the type-I rate fit.
"""

import numpy as np

from vpmcf import FlowConfig, GridSpec, Mode, fit_type1, run
from vpmcf.harness import presets

n = 2
grid = GridSpec(0.0, 1.0, 64, n)
traj = run(presets.cylinder(grid, 1.0),
           FlowConfig(t_end=1.0, mode=Mode.PLAIN_MCF, record_rho_factor=0.9,
                      output_every=10**6))

T = 1.0 / (2 * (n - 1))
print(f"status {traj.status.value} at t = {traj.final.t:.8f} (closed form T = {T})")

print("\n       t        rho_min      exact       rel err")
for s in traj.states[:: max(1, len(traj) // 12)]:
    exact = np.sqrt(1 - 2 * (n - 1) * s.t)
    print(f"{s.t:10.6f}  {s.rho.min():10.6f}  {exact:10.6f}  {abs(s.rho.min() - exact) / exact:.2e}")

# 1/max|A|^2 should be affine in t with slope -1/C and root T.
fit = fit_type1(traj)
print()
print(fit.report())
