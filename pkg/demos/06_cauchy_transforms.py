"""Cauchy transforms of the densities and recovery by Stieltjes inversion.

The p-th derivative of the transform of eta_p reproduces the remainder
trace. Going the other way, -Im G(t + i eps) / pi tends to eta_p(t), with an
error proportional to eps away from the breakpoints.
"""
import numpy as np

from specshift import (MeasureSpec, cauchy_derivative, cauchy_transform, eta_sequence, f_z, random_pair,
                       remainder_trace, stieltjes_invert)
from specshift.cauchy import log_boundary_value
from specshift.divdiff import cumulative_spline_kernel

H0, V = random_pair(4, np.random.default_rng(5))
S = eta_sequence(H0, V, 3)[2]
m = MeasureSpec.from_density(S.density)
z = 2 + 1j
print("(-1)^3 tr R_3(f_z):", -remainder_trace(H0, V, f_z(z), 3))
print("G'''(z) of eta_3:  ", cauchy_derivative(m, z, 3))

# Inversion at the midpoint of the widest interval.
b = S.density.breakpoints
k = int(np.argmax(np.diff(b)))
t = 0.5 * (b[k] + b[k + 1])
r = stieltjes_invert(lambda w: cauchy_transform(m, w), t, (1e-2, 5e-3, 2.5e-3, 1.25e-3))
print(f"\neta_3({t:.4f}) = {S(t):.10f}")
for e, est in zip(r.eps, r.estimates):
    print(f"  eps {e:.2e}: estimate {est:.10f}, error {abs(est - S(t)):.2e}")

# The log transform of a basic spline has boundary values given by the
# cumulative kernel. Two rounds of Richardson extrapolation in eps remove the
# linear and quadratic terms.
nodes = [-1.0, 0.0, 0.0, 1.5]
t = 0.6
v = [log_boundary_value(nodes, t, e) for e in (1e-3, 5e-4, 2.5e-4)]
r1, r2 = 2 * v[1] - v[0], 2 * v[2] - v[1]
print("\nlog transform boundary value:", (4 * r2 - r1) / 3,
      " cumulative kernel / (p - 1):", cumulative_spline_kernel(nodes, t) / 3)
