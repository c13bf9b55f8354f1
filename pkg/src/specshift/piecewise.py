"""Piecewise polynomials with constant tails and exact integration.

A :class:`PiecewisePolynomial` holds breakpoints ``b_0 < ... < b_K`` and, on
each left-closed interval ``[b_k, b_{k+1})``, the ascending coefficients of a
polynomial in the local variable ``u = t - b_k``. Outside ``[b_0, b_K)`` the
function is constant (``left_tail`` / ``right_tail``).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import binom

from .errors import DomainError
from .functions import (Exponential, FunctionSpec, Polynomial, ResolventPower,
                        rising_factorial)

__all__ = ["PiecewisePolynomial", "piecewise_integrate", "taylor_shift",
           "resolvent_moments", "log_moments"]

# intervals with |z - b| > FAR_RATIO * length use the geometric series
FAR_RATIO = 2.0
_SERIES_TERMS = 64


def taylor_shift(coeffs, delta):
    """Re-expand ascending coefficients in ``u`` as coefficients in ``u - delta``.

    Works row-wise on a 2-D array with one ``delta`` per row.
    """
    c = np.atleast_2d(np.asarray(coeffs))
    delta = np.asarray(delta)
    if c.dtype != object:
        delta = delta.astype(float)
    delta = np.broadcast_to(delta, (c.shape[0],))
    n = c.shape[1]
    out = np.zeros_like(c)
    for m in range(n):
        for j in range(m, n):
            out[:, m] += c[:, j] * binom(j, m) * delta ** (j - m)
    return out


def _is_object(c):
    return np.asarray(c).dtype == object


def exact_difference(a, b):
    """``a - b`` for float arrays, evaluated in extended precision.

    Used when coefficients are extended-precision objects, so that interval
    widths and shifts carry no rounding of their own.
    """
    import mpmath

    a = np.asarray(a, dtype=float)
    b = np.broadcast_to(np.asarray(b, dtype=float), a.shape)
    out = np.empty(a.shape, dtype=object)
    for i in np.ndindex(a.shape):
        out[i] = mpmath.mpf(float(a[i])) - mpmath.mpf(float(b[i]))
    return out


def _polymul_rows(a, b):
    out = np.zeros((a.shape[0], a.shape[1] + b.shape[1] - 1),
                   dtype=np.result_type(a, b))
    for i in range(a.shape[1]):
        out[:, i:i + b.shape[1]] += a[:, i:i + 1] * b
    return out


def _pad_columns(c, n):
    out = np.zeros((c.shape[0], n), dtype=c.dtype)
    out[:, :c.shape[1]] = c
    return out


class PiecewisePolynomial:
    """Piecewise polynomial on left-closed intervals with constant tails.

    Parameters
    ----------
    breakpoints : array_like, shape (K+1,)
        Strictly increasing. May be empty, in which case the function is the
        constant ``left_tail`` (which must equal ``right_tail``).
    coefficients : array_like, shape (K, d+1)
        Local ascending coefficients, row ``k`` in powers of ``t - b_k``.
    left_tail, right_tail : float
    """

    def __init__(self, breakpoints, coefficients, left_tail=0.0, right_tail=0.0):
        b = np.asarray(breakpoints, dtype=float).ravel()
        K = max(len(b) - 1, 0)
        c = np.asarray(coefficients)
        if c.size == 0:
            c = np.zeros((K, 1), dtype=c.dtype if c.dtype.kind == "c" else float)
        c = np.atleast_2d(c) if K else c.reshape(0, max(c.shape[-1] if c.ndim else 1, 1))
        if c.shape[0] != K:
            raise DomainError(f"{len(b)} breakpoints need {K} coefficient rows, got {c.shape[0]}")
        if np.any(np.diff(b) <= 0):
            raise DomainError("breakpoints must be strictly increasing")
        if len(b) == 0 and left_tail != right_tail:
            raise DomainError("without breakpoints the tails must agree")
        self.breakpoints = b
        self.coefficients = c
        self.left_tail = left_tail
        self.right_tail = right_tail

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls([], np.zeros((0, 1)))

    @classmethod
    def constant_pieces(cls, breakpoints, values, left_tail=0.0, right_tail=0.0):
        values = np.asarray(values)
        return cls(breakpoints, values.reshape(-1, 1), left_tail, right_tail)

    # basic properties -----------------------------------------------------

    @property
    def n_intervals(self):
        return self.coefficients.shape[0]

    @property
    def degree(self):
        return self.coefficients.shape[1] - 1

    @property
    def widths(self):
        b = self.breakpoints
        if _is_object(self.coefficients):
            return exact_difference(b[1:], b[:-1])
        return np.diff(b)

    @property
    def extended(self):
        """True when coefficients are extended-precision objects."""
        return _is_object(self.coefficients)

    def to_float(self):
        """Copy with float coefficients and tails."""
        def f(x):
            return float(x.real) if hasattr(x, "imag") and not isinstance(x, float) else float(x)
        c = self.coefficients
        if _is_object(c):
            c = np.vectorize(f, otypes=[float])(c) if c.size else np.zeros(c.shape)
        return PiecewisePolynomial(self.breakpoints, c, f(self.left_tail), f(self.right_tail))

    def is_supported(self, tol=0.0):
        return abs(self.left_tail) <= tol and abs(self.right_tail) <= tol

    def support(self, tol=0.0):
        """Smallest ``[lo, hi]`` outside which the function is zero (or None)."""
        if not self.is_supported():
            return (-math.inf, math.inf)
        nz = np.nonzero(np.any(np.abs(self.coefficients) > tol, axis=1))[0]
        if nz.size == 0:
            return None
        return float(self.breakpoints[nz[0]]), float(self.breakpoints[nz[-1] + 1])

    def real(self):
        return PiecewisePolynomial(self.breakpoints, self.coefficients.real,
                                   float(np.real(self.left_tail)), float(np.real(self.right_tail)))

    def __repr__(self):
        return (f"PiecewisePolynomial(K={self.n_intervals}, degree={self.degree}, "
                f"tails=({self.left_tail}, {self.right_tail}))")

    # evaluation -------------------------------------------------------------

    def __call__(self, t, deriv=0):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        b = self.breakpoints
        dtype = np.result_type(self.coefficients, np.asarray(self.left_tail),
                               np.asarray(self.right_tail), float)
        out = np.zeros(flat.shape, dtype=dtype)
        if len(b) == 0:
            out[:] = self.left_tail if deriv == 0 else 0.0
            return out.reshape(t.shape) if t.ndim else out[0]
        left = flat < b[0]
        right = flat >= b[-1]
        if deriv == 0:
            out[left] = self.left_tail
            out[right] = self.right_tail
        inner = ~(left | right)
        if np.any(inner):
            k = np.searchsorted(b, flat[inner], side="right") - 1
            u = flat[inner] - b[k]
            c = self.coefficients
            if deriv:
                c = self.derivative(deriv).coefficients
            acc = np.zeros(u.shape, dtype=dtype)
            for j in range(c.shape[1] - 1, -1, -1):
                acc = acc * u + c[k, j]
            out[inner] = acc
        return out.reshape(t.shape) if t.ndim else out[0]

    def end_values(self, deriv=0):
        """Value (or derivative) of each piece at the right end of its interval."""
        c = self.derivative(deriv).coefficients if deriv else self.coefficients
        L = self.widths
        acc = np.zeros(c.shape[0], dtype=c.dtype)
        for j in range(c.shape[1] - 1, -1, -1):
            acc = acc * L + c[:, j]
        return acc

    # algebra ----------------------------------------------------------------

    def derivative(self, order=1):
        c = self.coefficients
        for _ in range(order):
            if c.shape[1] == 1:
                c = np.zeros_like(c)
                break
            c = c[:, 1:] * np.arange(1, c.shape[1])
        return PiecewisePolynomial(self.breakpoints, c, 0.0, 0.0)

    def antiderivative(self):
        """``t -> int_{-inf}^t P``; requires a zero left tail.

        The right tail of the result is the total integral, so a nonzero
        right tail of ``self`` is rejected as well.
        """
        if self.left_tail != 0 or self.right_tail != 0:
            raise DomainError("antiderivative needs zero tails (compact support)")
        c = self.coefficients
        K = c.shape[0]
        new = np.zeros((K, c.shape[1] + 1), dtype=np.result_type(c, float))
        new[:, 1:] = c / np.arange(1, c.shape[1] + 1)
        # piece integrals then running constants
        if K:
            L = self.widths
            acc = np.zeros(K, dtype=new.dtype)
            for j in range(new.shape[1] - 1, -1, -1):
                acc = acc * L + new[:, j]
            consts = np.concatenate([[0.0], np.cumsum(acc)])
            new[:, 0] = consts[:-1]
            total = consts[-1]
        else:
            total = 0.0
        return PiecewisePolynomial(self.breakpoints, new, 0.0, total)

    def integral(self):
        """Total integral of a compactly supported piecewise polynomial."""
        return self.antiderivative().right_tail

    def refine(self, grid):
        """Same function on a finer breakpoint grid (must contain ``self``'s)."""
        grid = np.asarray(grid, dtype=float)
        b = self.breakpoints
        if len(b) and not np.all(np.isin(b, grid)):
            raise DomainError("refinement grid must contain the current breakpoints")
        K = len(grid) - 1
        if K < 1:
            return PiecewisePolynomial(grid, np.zeros((0, self.coefficients.shape[1])),
                                       self.left_tail, self.right_tail)
        ncoef = self.coefficients.shape[1]
        dtype = np.result_type(self.coefficients, np.asarray(self.left_tail),
                               np.asarray(self.right_tail), float)
        new = np.zeros((K, ncoef), dtype=dtype)
        starts = grid[:-1]
        if len(b) == 0:
            new[:, 0] = self.left_tail
        else:
            left = starts < b[0]
            right = starts >= b[-1]
            new[left, 0] = self.left_tail
            new[right, 0] = self.right_tail
            inner = ~(left | right)
            k = np.searchsorted(b, starts[inner], side="right") - 1
            if dtype == object:
                delta = exact_difference(starts[inner], b[k])
            else:
                delta = starts[inner] - b[k]
            new[inner] = taylor_shift(self.coefficients[k], delta)
        return PiecewisePolynomial(grid, new, self.left_tail, self.right_tail)

    def _binary(self, other, op):
        if not isinstance(other, PiecewisePolynomial):
            c = op(self.coefficients.copy(), 0)
            c[:, 0] = op(self.coefficients[:, 0], other)
            return PiecewisePolynomial(self.breakpoints, c, op(self.left_tail, other),
                                       op(self.right_tail, other))
        grid = np.union1d(self.breakpoints, other.breakpoints)
        a, b = self.refine(grid), other.refine(grid)
        n = max(a.coefficients.shape[1], b.coefficients.shape[1])
        ca = _pad_columns(a.coefficients, n)
        cb = _pad_columns(b.coefficients, n)
        return PiecewisePolynomial(grid, op(ca, cb), op(a.left_tail, b.left_tail),
                                   op(a.right_tail, b.right_tail))

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PiecewisePolynomial(self.breakpoints, -self.coefficients,
                                   -self.left_tail, -self.right_tail)

    def __mul__(self, c):
        if isinstance(c, PiecewisePolynomial):
            return NotImplemented
        return PiecewisePolynomial(self.breakpoints, c * self.coefficients,
                                   c * self.left_tail, c * self.right_tail)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return PiecewisePolynomial(self.breakpoints, self.coefficients / c,
                                   self.left_tail / c, self.right_tail / c)

    def trim(self, tol=0.0):
        """Drop trailing coefficient columns that are zero within ``tol``."""
        c = self.coefficients
        while c.shape[1] > 1 and np.all(np.abs(c[:, -1]) <= tol):
            c = c[:, :-1]
        return PiecewisePolynomial(self.breakpoints, c, self.left_tail, self.right_tail)

    # serialisation ----------------------------------------------------------

    def to_dict(self):
        c = self.coefficients
        return {
            "breakpoints": self.breakpoints.tolist(),
            "coefficients": np.real(c).tolist(),
            "left_tail": float(np.real(self.left_tail)),
            "right_tail": float(np.real(self.right_tail)),
            "basis": "local ascending powers of (t - breakpoint)",
        }

    @classmethod
    def from_dict(cls, d):
        b = d["breakpoints"]
        c = np.asarray(d["coefficients"], dtype=float)
        if c.size == 0:
            c = np.zeros((max(len(b) - 1, 0), 1))
        return cls(b, c, d.get("left_tail", 0.0), d.get("right_tail", 0.0))


# ---------------------------------------------------------------------------
# exact moments over an interval [0, L]


def resolvent_moments(c, L, n_max, m):
    """``I[k, n] = int_0^L u^n (c_k - u)^(-m) du`` for ``n = 0..n_max``.

    ``c`` must have nonzero imaginary part. Intervals far from the pole use
    the convergent expansion of ``(1 - u/c)^(-m)``; the others use the
    binomial expansion around the pole with exact antiderivatives.
    """
    c = np.asarray(c, dtype=complex).ravel()
    L = np.broadcast_to(np.asarray(L, dtype=float), c.shape)
    out = np.zeros((c.size, n_max + 1), dtype=complex)
    far = np.abs(c) > FAR_RATIO * L
    if np.any(far):
        cf, Lf = c[far], L[far]
        j = np.arange(_SERIES_TERMS)
        coef = binom(m + j - 1, j)
        ratio = Lf[:, None] / cf[:, None]                   # |ratio| < 1/2
        powers = ratio ** j                                  # (N, J)
        for n in range(n_max + 1):
            terms = coef * powers / (n + j + 1)
            out[far, n] = Lf ** (n + 1) * cf ** (-m) * terms.sum(axis=1)
    near = ~far
    if np.any(near):
        cn, Ln = c[near], L[near]
        w1, w0 = cn - Ln, cn                                   # u = L, u = 0
        for n in range(n_max + 1):
            acc = np.zeros(cn.shape, dtype=complex)
            for r in range(n + 1):
                q = r - m
                if q == -1:
                    prim = np.log(w1) - np.log(w0)
                else:
                    prim = (w1 ** (q + 1) - w0 ** (q + 1)) / (q + 1)
                # du = -dw
                acc += -binom(n, r) * cn ** (n - r) * (-1) ** r * prim
            out[near, n] = acc
    return out


def log_moments(c, L, n_max):
    """``I[k, n] = int_0^L u^n log(c_k - u) du`` (principal branch)."""
    c = np.asarray(c, dtype=complex).ravel()
    L = np.broadcast_to(np.asarray(L, dtype=float), c.shape)
    out = np.zeros((c.size, n_max + 1), dtype=complex)
    far = np.abs(c) > FAR_RATIO * L
    if np.any(far):
        cf, Lf = c[far], L[far]
        j = np.arange(1, _SERIES_TERMS + 1)
        ratio = Lf[:, None] / cf[:, None]
        powers = ratio ** j
        for n in range(n_max + 1):
            series = (powers / (j * (n + j + 1))).sum(axis=1)
            out[far, n] = Lf ** (n + 1) * (np.log(cf) / (n + 1) - series)
    near = ~far
    if np.any(near):
        cn, Ln = c[near], L[near]
        w1, w0 = cn - Ln, cn

        def prim(w, r):
            return w ** (r + 1) * (np.log(w) / (r + 1) - 1.0 / (r + 1) ** 2)

        for n in range(n_max + 1):
            acc = np.zeros(cn.shape, dtype=complex)
            for r in range(n + 1):
                acc += -binom(n, r) * cn ** (n - r) * (-1) ** r * (prim(w1, r) - prim(w0, r))
            out[near, n] = acc
    return out


def _poly_moments(L, n_max):
    n = np.arange(n_max + 1)
    return np.asarray(L, dtype=float)[:, None] ** (n + 1) / (n + 1)


def _exp_moments(s, L, n_max):
    """``int_0^L u^n exp(i s u) du``."""
    L = np.asarray(L, dtype=float)
    out = np.zeros((L.size, n_max + 1), dtype=complex)
    if s == 0.0:
        return _poly_moments(L, n_max).astype(complex)
    small = np.abs(s * L) <= 2.0
    if np.any(small):
        Ls = L[small]
        k = np.arange(40)
        fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
        for n in range(n_max + 1):
            terms = (1j * s) ** k / (fact * (n + k + 1))
            out[small, n] = Ls ** (n + 1) * np.polyval(terms[::-1], Ls)
    big = ~small
    if np.any(big):
        Lb = L[big]
        e = np.exp(1j * s * Lb)
        prev = (e - 1.0) / (1j * s)
        out[big, 0] = prev
        for n in range(1, n_max + 1):
            prev = (Lb ** n * e - n * prev) / (1j * s)
            out[big, n] = prev
    return out


def _tail_resolvent(P, z, m):
    """Integral of the constant tails against ``(z - t)^(-m)``."""
    total = 0.0
    b = P.breakpoints
    lo = b[0] if len(b) else 0.0
    hi = b[-1] if len(b) else 0.0
    for val, end, sign in ((P.left_tail, lo, 1.0), (P.right_tail, hi, -1.0)):
        if val == 0:
            continue
        if m < 2:
            raise DomainError("nonzero tail is not integrable against 1/(z - t)")
        total += sign * val * (z - end) ** (1 - m) / (m - 1)
    return total


def piecewise_integrate(P, f, j=0):
    """Exact ``int P(t) f^{(j)}(t) dt``.

    Closed forms exist for resolvent powers, polynomials and complex
    exponentials (and linear combinations). Any other :class:`FunctionSpec`
    falls back to adaptive quadrature per interval at absolute tolerance
    ``1e-12``.
    """
    total = 0.0 + 0.0j
    for coef, g in f.terms():
        total += coef * _integrate_atomic(P, g, j)
    return total


def _integrate_atomic(P, g, j):
    b = P.breakpoints
    c = P.coefficients
    K = P.n_intervals
    d = P.degree
    if isinstance(g, ResolventPower):
        m = g.k + j
        scale = rising_factorial(g.k, j)
        val = _tail_resolvent(P, g.z, m)
        if K:
            mom = resolvent_moments(g.z - b[:-1], P.widths, d, m)
            val += np.sum(c * mom)
        return scale * val
    if not P.is_supported():
        raise DomainError("non-resolvent integrands need a compactly supported density")
    if K == 0:
        return 0.0
    if isinstance(g, Polynomial):
        q = g.coefficient_array(j)
        # f^{(j)}(b_k + u) in local powers of u, times the piece
        rows = taylor_shift(np.tile(q, (K, 1)), b[:-1])
        prod = _polymul_rows(c, rows)
        return complex(np.sum(prod * _poly_moments(P.widths, prod.shape[1] - 1)))
    if isinstance(g, Exponential):
        s = g.s
        mom = _exp_moments(s, P.widths, d)
        phase = (1j * s) ** j * np.exp(1j * s * b[:-1])
        return complex(np.sum(phase[:, None] * c * mom))
    if isinstance(g, FunctionSpec):
        total = 0.0 + 0.0j
        for k in range(K):
            def integrand(u, k=k, part=None):
                return complex(np.polyval(c[k, ::-1], u) * g.derivative(b[k] + u, j))
            re = sp_integrate.quad(lambda u: integrand(u).real, 0.0, P.widths[k],
                                   epsabs=1e-12, limit=200)[0]
            im = sp_integrate.quad(lambda u: integrand(u).imag, 0.0, P.widths[k],
                                   epsabs=1e-12, limit=200)[0]
            total += re + 1j * im
        return total
    raise DomainError(f"unsupported integrand {g!r}")
