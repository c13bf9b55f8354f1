"""The multilinear spectral measure of a matrix pair.

Its atoms sit on tuples of eigenvalues of H0 with weights
tr(E_1 V E_2 V ... E_p V). Integrating divided differences against it
gives traces of Taylor terms and resolvent products.
"""
import numpy as np

from specshift import build_measure, f_z, integrate_divided_difference, spectral_decompose
from specshift.multimeasure import kernel_integral_to_piecewise, resolvent_power_trace

H0 = np.diag([0.0, 1.0])
V = np.array([[1.0, 2.0], [2.0, 3.0]])
D = spectral_decompose(H0)

for p in (1, 2, 3):
    m = build_measure(D, V, p)
    atoms = {k: round(w.real, 12) for k, w in m.items()}
    print(f"order {p}: total {m.total().real:g} (tr V^{p} = {np.trace(np.linalg.matrix_power(V, p)):g})")
    if p <= 2:
        print("   atoms:", atoms)

# tr(((z - H0)^-1 V)^p) straight from the atoms.
z = 2j
m2 = build_measure(D, V, 2)
R = np.linalg.inv(z * np.eye(2) - H0)
print("\nresolvent product trace, matrix:", np.trace(R @ V @ R @ V))
print("resolvent product trace, atoms: ", resolvent_power_trace(m2, z))
print("divided differences of f_z:     ", integrate_divided_difference(m2, f_z(z)))

# Integrating the cumulative kernel against the measure gives a piecewise
# polynomial in t. Diagonal atoms contribute steps.
K = kernel_integral_to_piecewise(m2)
t = np.array([-0.5, 0.0, 0.5, 0.999, 1.0, 1.5])
print("\nkernel integral at", t, "\n ", K(t))
