"""Independent reference computations used by the tests.

None of these share code with the library: the exact remainder comes from
resolvent power series in mpmath, divided differences from the symmetric
sum formula, and spline kernels from scipy's B-splines.
"""
import math

import mpmath
import numpy as np
from scipy.interpolate import BSpline

DPS = 40


def _mp(M):
    M = np.asarray(M, dtype=complex)
    return mpmath.matrix([[mpmath.mpc(x.real, x.imag) for x in row] for row in M])


def _trace(A):
    return sum(A[i, i] for i in range(A.rows))


def exact_remainder_trace(H0, V, z, p, k=1):
    """``tr R_p(f)`` for ``f(x) = (z - x)^(-k)``, exactly in mpmath.

    ``(z - H0 - tV)^(-1) = sum_i t^i (R V)^i R`` with ``R = (z - H0)^(-1)``;
    the ``k``-th power of that series gives the Taylor terms.
    """
    with mpmath.workdps(DPS):
        n = np.asarray(H0).shape[0]
        I = mpmath.eye(n)
        A, B = _mp(H0), _mp(V)
        zz = mpmath.mpc(complex(z).real, complex(z).imag)
        R0 = (zz * I - A) ** -1
        R1 = (zz * I - A - B) ** -1
        base = [R0]
        for _ in range(1, p):
            base.append(R0 * B * base[-1])
        # truncated series of (sum_i t^i base_i)^k
        series = list(base)
        for _ in range(k - 1):
            series = [sum((series[a] * base[i - a] for a in range(i + 1)), mpmath.zeros(n))
                      for i in range(p)]
        full = R1 ** k
        rem = full - sum(series, mpmath.zeros(n))
        return complex(_trace(rem))


def exact_gateaux_trace(H0, V, z, j):
    """``tr`` of the ``t^j`` coefficient of ``(z - H0 - tV)^(-1)``."""
    with mpmath.workdps(DPS):
        n = np.asarray(H0).shape[0]
        A, B = _mp(H0), _mp(V)
        zz = mpmath.mpc(complex(z).real, complex(z).imag)
        R0 = (zz * mpmath.eye(n) - A) ** -1
        T = R0
        for _ in range(j):
            T = R0 * B * T
        return complex(_trace(T))


def divided_difference_distinct(f, nodes):
    """``sum_i f(x_i) / prod_{j != i} (x_i - x_j)`` in mpmath (distinct nodes)."""
    with mpmath.workdps(DPS):
        x = [mpmath.mpf(float(v)) for v in nodes]
        total = mpmath.mpc(0)
        for i, xi in enumerate(x):
            den = mpmath.fprod([xi - xj for j, xj in enumerate(x) if j != i])
            total += f(xi) / den
        return complex(total)


def resolvent_dd_confluent(z, k, nodes):
    """Divided difference of ``(z - x)^(-k)`` as a ``z``-derivative of the product."""
    with mpmath.workdps(DPS):
        zz = mpmath.mpc(complex(z).real, complex(z).imag)
        x = [mpmath.mpf(float(v)) for v in nodes]
        g = lambda w: mpmath.fprod([1 / (w - v) for v in x])
        d = mpmath.diff(g, zz, k - 1) if k > 1 else g(zz)
        return complex(d * (-1) ** (k - 1) / mpmath.factorial(k - 1))


def basic_spline_ref(nodes, t):
    """``[x_0..x_p] (. - t)_+^(p-1)`` via scipy: the B-spline over ``(x_p - x_0)``."""
    x = np.sort(np.asarray(nodes, dtype=float))
    b = BSpline.basis_element(x, extrapolate=False)
    v = np.nan_to_num(b(np.asarray(t, dtype=float)))
    return v / (x[-1] - x[0])


def scalar_remainder(f, derivs, h0, v, p):
    """Scalar ``f(h0 + v) - sum_{j<p} f^(j)(h0) v^j / j!`` from callables."""
    return f(h0 + v) - sum(derivs[j](h0) * v ** j / math.factorial(j) for j in range(p))
