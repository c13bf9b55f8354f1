"""Taylor remainders of the functional calculus along ``t -> H0 + tV``.

The remainder of order ``p`` is ``f(H0 + V)`` minus the first ``p`` terms of
the Taylor expansion of ``t -> f(H0 + tV)`` at ``t = 0``. Three routes are
provided for its trace:

``spectral``
    trace of the full remainder operator assembled in the eigenbasis of H0;
``multilinear``
    traces of the Taylor terms as integrals of divided differences against
    the multilinear spectral measure;
``finite_difference``
    central differences of ``t -> tr f(H0 + tV)`` with Richardson
    extrapolation (independent of all divided-difference code).
"""
from __future__ import annotations

import math
import string
from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .divdiff import divided_differences
from .errors import DomainError
from .multimeasure import build_measure, integrate_divided_difference
from .operator_core import apply_function, as_hermitian
from .pair import EXTENDED_DPS, PRECISIONS, as_pair

__all__ = [
    "RemainderResult",
    "gateaux_trace",
    "gateaux_operator",
    "remainder_operator",
    "remainder_trace",
    "remainder",
    "fd_derivative",
    "fd_remainder_trace",
    "trace_path",
    "FD_DPS",
]


@dataclass(frozen=True)
class RemainderResult:
    order: int
    value_trace: complex
    method: str
    operator: Optional[np.ndarray] = None


def gateaux_trace(D, V, f, j, measure=None):
    """``(1/j!) d^j/dt^j tr f(H0 + tV)`` at ``t = 0``.

    By cyclicity of the trace this is the order-``j`` measure integrated
    against ``[l_1..l_j, l_1] f``.
    """
    if j < 1:
        raise DomainError("Gateaux order must be positive")
    m = measure if measure is not None else build_measure(D, V, j)
    return integrate_divided_difference(m, f, "first_repeated")


def gateaux_operator(D, V, f, j):
    """The ``j``-th Taylor term ``(1/j!) d^j/dt^j f(H0 + tV)|_0`` as a matrix.

    Equal to ``sum [l_0..l_j] f  P_0 V P_1 ... V P_j`` over all ``j+1``-tuples
    of spectral projections. Computed over eigenvector tuples, which is the
    same sum with each projection split into rank-one pieces.
    """
    V = as_hermitian(V).matrix
    U = D.eigenvectors
    Vt = U.conj().T @ V @ U
    lam = D.nodes
    n = lam.size
    grids = np.meshgrid(*([np.arange(n)] * (j + 1)), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    dd = divided_differences(f, np.sort(lam[idx], axis=1)).reshape((n,) * (j + 1))
    letters = string.ascii_letters[:j + 1]
    ops = [letters] + [letters[i] + letters[i + 1] for i in range(j)]
    spec = ",".join(ops) + "->" + letters[0] + letters[-1]
    Gt = np.einsum(spec, dd, *([Vt] * j), optimize=True)
    return U @ Gt @ U.conj().T


def remainder_operator(H0, V, f, p, precision="auto"):
    """The order-``p`` Taylor remainder as a matrix.

    ``precision`` works as in :func:`remainder_trace`.
    """
    pair = as_pair(H0, V)
    if p < 1:
        raise DomainError("remainder order must be positive")
    if precision not in PRECISIONS:
        raise DomainError(f"unknown precision {precision!r}")
    if precision == "auto":
        precision = _remainder_precision(pair, p)
    if precision == "extended":
        return _remainder_operator_extended(pair, f, p)
    R = apply_function(pair.D1, f) - apply_function(pair.D0, f)
    for j in range(1, p):
        R = R - gateaux_operator(pair.D0, pair.V, f, j)
    return R


def _gateaux_operator_extended(pair, f, j):
    # object array in the eigenbasis of H0: sum over index paths a -> ... -> b
    # of [l_a, ..., l_b] f times the product of V~ entries along the path
    import mpmath
    key = ("gateaux_op", f, j)
    if key not in pair._ext:
        Vt = pair._model_vt()
        n = pair.dim
        with mpmath.workdps(EXTENDED_DPS):
            lam = [mpmath.mpf(float(v)) for v in pair.D0.nodes]
            Vm = [[mpmath.mpc(Vt[a, b].real, Vt[a, b].imag) for b in range(n)] for a in range(n)]
            memo = {}
            G = np.empty((n, n), dtype=object)
            G[...] = mpmath.mpc(0)
            for idx in np.ndindex(*((n,) * (j + 1))):
                w = Vm[idx[0]][idx[1]]
                for a, b in zip(idx[1:-1], idx[2:]):
                    w = w * Vm[a][b]
                nodes = tuple(sorted(lam[a] for a in idx))
                if nodes not in memo:
                    memo[nodes] = _mp_divided_difference(f, list(nodes))
                G[idx[0], idx[-1]] += memo[nodes] * w
        pair._ext[key] = G
    return pair._ext[key]


def _remainder_operator_extended(pair, f, p):
    import mpmath
    n = pair.dim
    with mpmath.workdps(EXTENDED_DPS):
        E, Q = pair.model_eigensystem_extended()
        fE = [f.mp_derivative(e, 0) for e in E]
        R = np.empty((n, n), dtype=object)
        for a in range(n):
            for b in range(n):
                R[a, b] = mpmath.fsum(Q[a, k] * fE[k] * mpmath.conj(Q[b, k]) for k in range(n))
        for a in range(n):
            R[a, a] -= f.mp_derivative(mpmath.mpf(float(pair.D0.nodes[a])), 0)
        for j in range(1, p):
            R = R - _gateaux_operator_extended(pair, f, j)
        Rt = np.array([[complex(R[a, b]) for b in range(n)] for a in range(n)])
    U = pair.D0.eigenvectors
    return U @ Rt @ U.conj().T


def _trace_f(D, f):
    from .operator_core import _check_poles
    _check_poles(f, D.eigenvalues)
    return complex(np.sum(D.multiplicities * f(D.eigenvalues)))


def _remainder_precision(pair, p):
    # tr f(H0+V) - tr f(H0) carries about eps * width of absolute rounding in
    # units of |f'|, and the remainder can be many orders below |f'| when the
    # spectrum lies far from the poles, so the width alone decides
    loss = np.finfo(float).eps * (1.0 + pair.spectral_width())
    return "extended" if loss > _REMAINDER_THRESHOLD else "double"


# eps * (1 + width) above this (width beyond about 4500) selects extended
_REMAINDER_THRESHOLD = 1e-12


def remainder_trace(H0, V, f, p, precision="auto"):
    """Trace of the order-``p`` remainder via the multilinear measures.

    Parameters
    ----------
    precision : {"auto", "double", "extended"}
        ``extended`` evaluates every term at ``EXTENDED_DPS`` digits on the
        model used for the densities (eigenvalues of ``H0`` and ``V`` in the
        eigenbasis of ``H0``). ``auto`` switches to it when the cancellation
        between the terms would cost more than ``1e-10`` relative accuracy,
        which happens on wide spectra.
    """
    pair = as_pair(H0, V)
    if p < 1:
        raise DomainError("remainder order must be positive")
    if precision not in PRECISIONS:
        raise DomainError(f"unknown precision {precision!r}")
    if precision == "auto":
        precision = _remainder_precision(pair, p)
    if precision == "extended":
        return _remainder_trace_extended(pair, f, p)
    val = _trace_f(pair.D1, f) - _trace_f(pair.D0, f)
    for j in range(1, p):
        val -= gateaux_trace(pair.D0, pair.V, f, j, measure=pair.measure(j))
    return val


def _mp_divided_difference(f, x):
    # sorted mpmath nodes; equal nodes take the derivative branch
    n = len(x)
    T = [f.mp_derivative(v, 0) for v in x]
    for k in range(1, n):
        T = [f.mp_derivative(x[i], k) / math.factorial(k) if x[i + k] == x[i]
             else (T[i + 1] - T[i]) / (x[i + k] - x[i]) for i in range(n - k)]
    return T[0]


def _gateaux_trace_extended(pair, f, j):
    """Order-``j`` Taylor term of ``tr f`` from the grouped extended weights.

    The weight of a label tuple is invariant under cyclic rotation, so the
    repeated-first-node pattern can be averaged over all positions; the
    result then depends only on the sorted label multiset.
    """
    import mpmath
    key = ("gateaux", f, j)
    if key not in pair._ext:
        keys, sums = pair.measure_extended(j)
        with mpmath.workdps(EXTENDED_DPS):
            lam = [mpmath.mpf(float(v)) for v in pair.D0.eigenvalues]
            total = mpmath.mpc(0)
            for row, w in zip(keys, sums):
                nodes = sorted(lam[a] for a in row)
                labels, counts = np.unique(row, return_counts=True)
                inner = mpmath.fsum(int(c) * _mp_divided_difference(f, sorted(nodes + [lam[a]]))
                                    for a, c in zip(labels, counts))
                total += w * inner / j
        pair._ext[key] = total
    return pair._ext[key]


def _remainder_trace_extended(pair, f, p):
    import mpmath
    with mpmath.workdps(EXTENDED_DPS):
        E = pair.model_eigenvalues_extended()
        val = mpmath.fsum(f.mp_derivative(e, 0) for e in E)
        for lam, m in zip(pair.D0.eigenvalues, pair.D0.multiplicities):
            val -= int(m) * f.mp_derivative(mpmath.mpf(float(lam)), 0)
        for j in range(1, p):
            val -= _gateaux_trace_extended(pair, f, j)
        return complex(val)


# ---------------------------------------------------------------------------
# finite-difference oracle

_STENCIL_HALF_WIDTH = 4

# digits used for g(t) = tr f(H0 + tV) in the oracle; the order-j stencil
# divides by h^j, so double rounding of g swamps remainders near 1e-8
FD_DPS = 32


@lru_cache(maxsize=None)
def _central_weights(order, half=_STENCIL_HALF_WIDTH):
    """Exact rational weights of the central stencil on ``-half..half``."""
    offs = list(range(-half, half + 1))
    n = len(offs)
    rows = [[Fraction(o) ** m for o in offs] + [Fraction(math.factorial(order) if m == order else 0)]
            for m in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                fac = rows[r][c] / rows[c][c]
                rows[r] = [x - fac * y for x, y in zip(rows[r], rows[c])]
    return tuple(offs), tuple(rows[i][n] / rows[i][i] for i in range(n))


def _stencil_order(order, half=_STENCIL_HALF_WIDTH):
    npts = 2 * half + 1
    return npts - order if order % 2 else npts + 1 - order


def fd_derivative(g, order, h, levels=2, dps=None):
    """Derivative of a scalar function at 0 by a 9-point central stencil.

    The stencil is applied at steps ``h * 2**l`` for ``l = 0..levels`` and the
    results are combined by Richardson extrapolation, removing one even
    power of the step per level. With ``dps`` the arithmetic runs in mpmath
    and ``g`` receives mpmath reals.
    """
    if order == 0:
        return complex(g(0.0))
    if dps is None:
        return _fd_derivative(g, order, h, levels, float, complex)
    import mpmath
    with mpmath.workdps(dps):
        return complex(_fd_derivative(g, order, mpmath.mpf(h), levels, mpmath.mpf, mpmath.mpc))


def _fd_derivative(g, order, h, levels, real, cplx):
    offs, w = _central_weights(order)
    q = _stencil_order(order)
    est = []
    for lev in range(levels + 1):
        s = h * 2 ** lev
        acc = cplx(0)
        for o, wi in zip(offs, w):
            if wi:
                acc += real(wi.numerator) / real(wi.denominator) * g(o * s)
        est.append(acc / s ** order)
    for lev in range(levels):
        r = real(2) ** (q + 2 * lev)
        # est[i] uses step h*2^i: the finer estimate is est[i]
        est = [(r * est[i] - est[i + 1]) / (r - 1) for i in range(len(est) - 1)]
    return est[0]


class _EigenPath:
    """Extended-precision eigenvalues of ``H0 + tV``, cached by ``t``."""

    def __init__(self, H0, V, dps):
        import mpmath
        self.dps = dps
        n = H0.shape[0]
        with mpmath.workdps(dps):
            self.A = [[mpmath.mpc(H0[i, j].real, H0[i, j].imag) for j in range(n)] for i in range(n)]
            self.B = [[mpmath.mpc(V[i, j].real, V[i, j].imag) for j in range(n)] for i in range(n)]
        self.cache = {}

    def eigenvalues(self, t):
        import mpmath
        if t not in self.cache:
            n = len(self.A)
            M = mpmath.matrix(n, n)
            for i in range(n):
                for j in range(n):
                    M[i, j] = self.A[i][j] + t * self.B[i][j]
            self.cache[t] = mpmath.eighe(M, eigvals_only=True)
        return self.cache[t]


_PATHS = OrderedDict()
_PATH_CACHE_SIZE = 4


def _eigen_path(H0, V, dps):
    key = (H0.tobytes(), V.tobytes(), H0.shape, dps)
    if key in _PATHS:
        _PATHS.move_to_end(key)
    else:
        _PATHS[key] = _EigenPath(H0, V, dps)
        if len(_PATHS) > _PATH_CACHE_SIZE:
            _PATHS.popitem(last=False)
    return _PATHS[key]


def trace_path(H0, V, f, dps=FD_DPS):
    """``t -> tr f(H0 + tV)`` by eigenvalues, in double or at ``dps`` digits.

    Extended eigenvalues are cached per ``(H0, V)`` so that every order and
    every ``f`` on the same pair reuses the stencil points.
    """
    H0 = np.ascontiguousarray(as_hermitian(H0).matrix)
    V = np.ascontiguousarray(as_hermitian(V).matrix)
    if dps is None:
        return lambda t: complex(np.sum(f(np.linalg.eigvalsh(H0 + float(t) * V))))
    import mpmath
    path = _eigen_path(H0, V, dps)

    def g(t):
        with mpmath.workdps(dps):
            return mpmath.fsum(f.mp_derivative(e, 0) for e in path.eigenvalues(mpmath.mpf(t)))

    return g


def fd_remainder_trace(H0, V, f, p, h=None, levels=2, dps=FD_DPS):
    """Finite-difference oracle for the remainder trace.

    Default step ``1e-2 / (1 + ||V||)``. ``dps=None`` evaluates in double,
    which limits the attainable relative accuracy for small remainders.
    """
    H0m = as_hermitian(H0).matrix
    Vm = as_hermitian(V).matrix
    if h is None:
        h = 1e-2 / (1.0 + np.linalg.norm(Vm, 2))
    if h <= 0:
        raise DomainError("step must be positive")
    g = trace_path(H0m, Vm, f, dps)
    if dps is None:
        val = g(1.0) - g(0.0)
        for j in range(1, p):
            val -= fd_derivative(g, j, h, levels) / math.factorial(j)
        return complex(val)
    import mpmath
    with mpmath.workdps(dps):
        val = g(1) - g(0)
        for j in range(1, p):
            val -= _fd_derivative(g, j, mpmath.mpf(h), levels, mpmath.mpf, mpmath.mpc) / math.factorial(j)
        return complex(val)


def remainder(H0, V, f, p, method="multilinear", **kwargs):
    """Remainder trace by the chosen route, wrapped in :class:`RemainderResult`."""
    if method == "multilinear":
        return RemainderResult(p, remainder_trace(H0, V, f, p, **kwargs), method)
    if method == "spectral":
        R = remainder_operator(H0, V, f, p, **kwargs)
        return RemainderResult(p, complex(np.trace(R)), method, R)
    if method == "finite_difference":
        pair = as_pair(H0, V)
        return RemainderResult(p, fd_remainder_trace(pair.H0, pair.V, f, p, **kwargs), method)
    raise DomainError(f"unknown method {method!r}")
