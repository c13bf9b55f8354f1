"""Three independent routes to the trace of a Taylor remainder.

R_p(f) = f(H0 + V) - sum_{j<p} (1/j!) d^j/dt^j f(H0 + tV)|_{t=0}.

1. multilinear: tr f(H0+V) - tr f(H0) minus Gateaux traces from the measure
2. spectral:    the same built as a matrix from eigendecompositions
3. oracle:      finite differences of t -> tr f(H0 + tV) with Richardson
                extrapolation, eigenvalues in 32-digit arithmetic
"""
import numpy as np

from specshift import ensemble, f_z, fd_remainder_trace, remainder

H0, V = ensemble(1, (5, 5), seed=3)[0]
f = f_z(2 + 1j)
print(" p   multilinear                  spectral - multilinear   oracle - multilinear")
for p in range(1, 6):
    a = remainder(H0, V, f, p, method="multilinear").value_trace
    b = remainder(H0, V, f, p, method="spectral").value_trace
    c = fd_remainder_trace(H0, V, f, p, h=1e-2)
    print(f" {p}  {a:.12e}   {abs(b - a):.2e}                 {abs(c - a):.2e}")

# For f_z the remainder has a closed form: R_p = ((z - H0)^-1 V)^p (z - H0 - V)^-1.
z = 2 + 1j
R0 = np.linalg.inv(z * np.eye(5) - H0)
R1 = np.linalg.inv(z * np.eye(5) - H0 - V)
for p in (1, 3, 5):
    direct = np.trace(np.linalg.matrix_power(R0 @ V, p) @ R1)
    print(f"p = {p}: resolvent identity gives {direct:.12e}")
