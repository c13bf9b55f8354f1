"""Spectral shift densities eta_1 ... eta_p and the trace formula.

eta_1 is Krein's spectral shift function, the difference of eigenvalue
counting functions. Each higher density comes from the previous one and the
multilinear measure, and satisfies

    tr R_p(f) = int f^(p)(t) eta_p(t) dt,    int eta_p = tr(V^p) / p!.
"""
import math

import numpy as np

from specshift import ResolventPower, eta_sequence, random_pair, remainder_trace, trace_formula_rhs

H0, V = random_pair(6, np.random.default_rng(11))
etas = eta_sequence(H0, V, 5)

print(" p  intervals  degree  mass               tr(V^p)/p!")
for S in etas:
    p = S.order
    target = np.trace(np.linalg.matrix_power(V, p)).real / math.factorial(p)
    print(f" {p}  {S.density.n_intervals:9d}  {S.density.degree:6d}  {S.mass: .12e}  {target: .12e}")

print("\ntrace formula, f = (z - x)^-2 at z = -3 + 0.5i")
f = ResolventPower(-3 + 0.5j, 2)
for S in etas:
    lhs = remainder_trace(H0, V, f, S.order)
    rhs = trace_formula_rhs(S, f)
    print(f"  p = {S.order}: remainder {lhs:.10e}, relative gap {abs(lhs - rhs) / abs(lhs):.1e}")

# A coarse text picture of eta_3. From order 3 on a density can change sign.
S = etas[2]
lo, hi = S.density.breakpoints[0], S.density.breakpoints[-1]
t = np.linspace(lo - 0.5, hi + 0.5, 25)
v = S(t)
scale = max(np.abs(v).max(), 1e-300)
print("\neta_3 sampled across its support")
for a, b in zip(t, v):
    bar = "#" * int(round(30 * abs(b) / scale))
    print(f"  {a:6.2f} {b: .4e} {'-' if b < 0 else ' '}{bar}")
