"""Pairs whose spectrum is wide compared with the perturbation.

With eigenvalues at +-1e4 and ||V|| <= 1, the densities are built from
repeated antiderivatives over long intervals and the remainders are tiny
differences of large numbers. Double precision loses most digits there, so
the library switches to 50-digit arithmetic for those steps when the
spectral width calls for it.
"""
import numpy as np

from specshift import Perturbation, eta_sequence, f_z, remainder_trace, trace_formula_rhs, wide_spectrum_pair

H0, V = wide_spectrum_pair(5, np.random.default_rng(2), scale=1e4)
pair = Perturbation(H0, V)
print("spectrum of H0:", np.round(pair.D0.eigenvalues, 3))

f = f_z(1j)
for p in (2, 3, 4):
    S_auto = eta_sequence(pair, None, p)[-1]
    fast = remainder_trace(pair, None, f, p, precision="double")
    careful = remainder_trace(pair, None, f, p, precision="extended")
    rhs = trace_formula_rhs(S_auto, f)
    print(f"p = {p}: precision used {S_auto.meta['precision']:8s} "
          f"double vs extended remainder gap {abs(fast - careful) / abs(careful):.1e}, "
          f"trace formula gap {abs(rhs - careful) / abs(careful):.1e}")
