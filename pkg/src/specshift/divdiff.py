"""Divided differences with repeated nodes, truncated powers and splines.

Two kernels in ``t`` built from divided differences of truncated powers are
central here. For nodes ``x_1..x_n``:

* the *basic spline* ``[x_1..x_n] (. - t)_+^(n-2)``, nonnegative with
  integral ``1/(n-1)``;
* the *cumulative kernel* ``[x_1..x_n] (. - t)_+^(n-1)``, decreasing from 1
  (left of all nodes) to 0 (right of all nodes).

Point values come from the recursive divided-difference table. Exact
piecewise forms come from the Cox-de Boor recurrence carried out on
polynomial coefficients, or alternatively from the explicit expansion of the
divided difference as a combination of derivatives at the distinct nodes.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import binom

from .errors import DegenerateSplineError, DomainError, PoleCollisionError
from .functions import FunctionSpec, Polynomial, ResolventPower, TruncatedPower, truncated_power
from .piecewise import PiecewisePolynomial

__all__ = [
    "NodeMultiset",
    "divided_difference",
    "divided_differences",
    "polynomial_divided_differences",
    "divided_difference_weights",
    "divided_difference_resolvent",
    "resolvent_divided_differences",
    "truncated_power",
    "cumulative_spline_kernel",
    "basic_spline",
    "spline_to_piecewise",
    "cumulative_kernel_pieces",
]


class NodeMultiset:
    """Real nodes with multiplicities.

    Nodes closer than ``merge_tol`` (single linkage on the sorted values) are
    replaced by their mean, so repeated nodes compare exactly equal. The
    default tolerance is ``1e-9 * (diameter + 1)``.

    >>> m = NodeMultiset([3.0, 1.0, 1.0])
    >>> m.distinct, m.multiplicities
    (array([1., 3.]), array([2, 1]))
    """

    def __init__(self, nodes, merge_tol=None):
        x = np.sort(np.asarray(nodes, dtype=float).ravel())
        if x.size == 0:
            raise DomainError("a node multiset needs at least one node")
        if not np.all(np.isfinite(x)):
            raise DomainError("nodes must be finite")
        tol = 1e-9 * (x[-1] - x[0] + 1.0) if merge_tol is None else float(merge_tol)
        labels = np.zeros(x.size, dtype=int)
        labels[1:] = np.cumsum(np.diff(x) > tol)
        counts = np.bincount(labels)
        means = np.bincount(labels, weights=x) / counts
        self.nodes = means[labels]
        self.distinct = means
        self.multiplicities = counts
        self.merge_tol = tol

    @classmethod
    def coerce(cls, nodes):
        return nodes if isinstance(nodes, cls) else cls(nodes)

    @property
    def n(self):
        return self.nodes.size

    @property
    def max_multiplicity(self):
        return int(self.multiplicities.max())

    @property
    def all_equal(self):
        return self.distinct.size == 1

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"NodeMultiset({self.nodes.tolist()})"


# ---------------------------------------------------------------------------
# divided differences


def _as_rows(nodes):
    if isinstance(nodes, NodeMultiset):
        return nodes.nodes[None, :]
    x = np.asarray(nodes, dtype=float)
    return np.sort(np.atleast_2d(x), axis=-1)


def _check_poles(f, x):
    for pole in f.poles:
        if x.size and np.min(np.abs(pole - x)) <= 1e-12:
            raise PoleCollisionError(f"pole {pole} collides with a node")


def _recursive_rows(f, x):
    """Divided-difference table on each (sorted) row of ``x``."""
    n = x.shape[1]
    T = np.asarray(f.derivative(x, 0), dtype=complex)
    for k in range(1, n):
        lo, hi = x[:, :n - k], x[:, k:]
        den = hi - lo
        eq = den == 0
        T = (T[:, 1:] - T[:, :-1]) / np.where(eq, 1.0, den)
        if np.any(eq):
            T[eq] = f.derivative(lo[eq], k) / math.factorial(k)
    return T[:, 0]


def divided_differences(f, nodes, method="auto"):
    """Divided differences of ``f`` over every row of a node array.

    Parameters
    ----------
    f : FunctionSpec
    nodes : array_like, shape (N, n) or (n,), or NodeMultiset
        Equal nodes within a row must be exactly equal.
    method : {"auto", "recursive", "closed"}
        ``"recursive"`` runs the divided-difference table with the derivative
        branch at repeated nodes. ``"closed"`` uses the product formula for
        resolvent terms and complete homogeneous sums for polynomials.
        ``"auto"`` picks the closed form wherever it exists.

    Returns
    -------
    ndarray of complex, shape (N,)
    """
    x = _as_rows(nodes)
    _check_poles(f, x)
    out = np.zeros(x.shape[0], dtype=complex)
    for coef, g in f.terms():
        if isinstance(g, ResolventPower) and method != "recursive":
            out += coef * resolvent_divided_differences(g.z, g.k, x)
        elif isinstance(g, Polynomial) and method != "recursive":
            out += coef * polynomial_divided_differences(g.coefficients, x)
        elif method == "closed":
            raise DomainError(f"no closed form registered for {g!r}")
        else:
            out += coef * _recursive_rows(g, x)
    return out


def polynomial_divided_differences(coefficients, nodes):
    """Closed form ``[x_0..x_n] x^m = h_{m-n}(x_0, ..., x_n)`` per row.

    ``h_k`` is the complete homogeneous symmetric polynomial, accumulated one
    node at a time; no differences of nearby values are formed.
    """
    x = _as_rows(nodes)
    c = np.asarray(coefficients)
    n = x.shape[1] - 1
    kmax = len(c) - 1 - n
    out = np.zeros(x.shape[0], dtype=complex)
    if kmax < 0:
        return out
    h = np.zeros((x.shape[0], kmax + 1))
    h[:, 0] = 1.0
    for i in range(x.shape[1]):
        for k in range(1, kmax + 1):
            h[:, k] = h[:, k] + x[:, i] * h[:, k - 1]
    return h @ c[n:].astype(complex)


def divided_difference(f, nodes, method="auto"):
    """Divided difference of order ``n - 1`` of ``f`` over ``n`` nodes.

    >>> from specshift.functions import Polynomial
    >>> divided_difference(Polynomial([0, 0, 1]), [0.0, 1.0, 2.0])
    (1+0j)
    """
    nodes = NodeMultiset.coerce(nodes)
    return complex(divided_differences(f, nodes, method=method)[0])


def divided_difference_weights(nodes):
    """Weights ``c[i, j]`` with ``[nodes] f = sum c[i, j] f^{(j)}(distinct[i])``.

    Row ``i`` refers to ``nodes.distinct[i]``; column ``j`` runs up to the
    largest multiplicity minus one.
    """
    nodes = NodeMultiset.coerce(nodes)
    x = nodes.nodes
    n = x.size
    pos = np.searchsorted(nodes.distinct, x)
    M = nodes.max_multiplicity
    T = np.zeros((n, nodes.distinct.size, M))
    T[np.arange(n), pos, 0] = 1.0
    for k in range(1, n):
        new = np.zeros((n - k, nodes.distinct.size, M))
        for i in range(n - k):
            den = x[i + k] - x[i]
            if den == 0:
                new[i, pos[i], k] = 1.0 / math.factorial(k)
            else:
                new[i] = (T[i + 1] - T[i]) / den
        T = new
    return T[0]


def _product_derivatives(z, x, order):
    """Derivatives in ``z`` of ``prod_i (z - x_i)^(-1)`` for each row of ``x``."""
    inv = 1.0 / (z - x)
    P = [np.prod(inv, axis=1)]
    logder = [None] + [(-1) ** m * math.factorial(m - 1) * np.sum(inv ** m, axis=1)
                       for m in range(1, order + 1)]
    for r in range(order):
        acc = np.zeros_like(P[0])
        for s in range(r + 1):
            acc = acc + binom(r, s) * logder[s + 1] * P[r - s]
        P.append(acc)
    return P


def resolvent_divided_differences(z, k, nodes, z_derivative=0):
    """Closed-form divided differences of ``x -> (z - x)^(-k)`` per row.

    For ``k = 1`` this is the product of ``(z - x_i)^(-1)`` over the row;
    higher powers follow by differentiating in ``z``. ``z_derivative``
    additionally differentiates the result that many times in ``z``.
    """
    z = complex(z)
    if z.imag == 0.0:
        raise DomainError("closed-form resolvent divided difference needs nonreal z")
    x = _as_rows(nodes)
    P = _product_derivatives(z, x, k - 1 + z_derivative)
    return (-1) ** (k - 1) / math.factorial(k - 1) * P[k - 1 + z_derivative]


def divided_difference_resolvent(z, k, nodes):
    """Scalar closed-form divided difference of ``f_z^k``.

    >>> divided_difference_resolvent(1j, 1, [0.0, 0.0, 0.0])
    1j
    """
    nodes = NodeMultiset.coerce(nodes)
    return complex(resolvent_divided_differences(z, k, nodes.nodes[None, :])[0])


# ---------------------------------------------------------------------------
# spline kernels: point values


def cumulative_spline_kernel(nodes, t):
    """``[x_1..x_p] (. - t)_+^(p-1)`` at ``t``.

    Equals the indicator of ``t < x_1`` when all nodes coincide (value 0 at
    ``t = x_1``). Evaluated through the Cox-de Boor piecewise form, which
    stays accurate for nearly coincident nodes where the divided-difference
    table does not.
    """
    nodes = NodeMultiset.coerce(nodes)
    t = float(t)
    if t < nodes.distinct[0]:
        return 1.0
    if t >= nodes.distinct[-1]:
        return 0.0
    return float(np.real(spline_to_piecewise(nodes, "cumulative")(t)))


def basic_spline(nodes, t):
    """Basic spline ``[x_0..x_p] (. - t)_+^(p-1)`` at ``t`` (needs two distinct nodes).

    Right-continuous at the nodes, like the piecewise form it is evaluated
    from.
    """
    nodes = NodeMultiset.coerce(nodes)
    if nodes.all_equal:
        raise DegenerateSplineError("basic spline needs at least two distinct nodes")
    t = float(t)
    if t < nodes.distinct[0] or t >= nodes.distinct[-1]:
        return 0.0
    return float(np.real(spline_to_piecewise(nodes, "basic")(t)))


# ---------------------------------------------------------------------------
# spline kernels: exact piecewise form


def _mul_linear(A, a, scale):
    """Coefficients of ``scale * (u + a) * A(u)`` row-wise."""
    out = np.zeros((A.shape[0], A.shape[1] + 1), dtype=A.dtype)
    out[:, 1:] += A
    out[:, :-1] += a[:, None] * A
    return scale * out


def _as_real_array(x):
    # extended-precision node arrays (dtype object) pass through untouched
    x = np.asarray(x)
    return x if x.dtype == object else x.astype(float)


def _to_dtype(values, dtype):
    if dtype != object:
        return np.asarray(values, dtype=dtype)
    import mpmath

    return np.array([mpmath.mpf(float(v)) for v in np.ravel(values)], dtype=object)


def _bspline_pieces(knots, order, starts):
    """Local coefficients of every normalised B-spline of ``order`` on intervals.

    Each interval starts at ``starts[j]`` and must lie inside a single knot
    span. Returns an array of shape (n_basis, n_intervals, order).
    """
    tau = _as_real_array(knots)
    dt = tau.dtype
    starts = np.asarray(starts, dtype=dt)
    nk = tau.size
    B = [((tau[i] <= starts) & (starts < tau[i + 1])).astype(dt)[:, None]
         for i in range(nk - 1)]
    for k in range(2, order + 1):
        nxt = []
        for i in range(nk - k):
            acc = np.zeros((starts.size, k), dtype=dt)
            den1 = tau[i + k - 1] - tau[i]
            if den1 > 0:
                acc += _mul_linear(B[i], starts - tau[i], 1.0 / den1)
            den2 = tau[i + k] - tau[i + 1]
            if den2 > 0:
                acc += _mul_linear(B[i + 1], starts - tau[i + k], -1.0 / den2)
            nxt.append(acc)
        B = nxt
    return np.array(B).reshape(len(B), starts.size, order)


def _grid_for(nodes, grid):
    if grid is None:
        return nodes.distinct.copy()
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isin(nodes.distinct, grid)):
        raise DomainError("grid must contain every distinct node")
    return grid


def cumulative_kernel_pieces(x, grid):
    """Local coefficients of the cumulative kernel of sorted nodes ``x`` on ``grid``.

    Returns an array (len(grid) - 1, len(x)). Pieces left of ``x[0]`` equal
    1 and pieces at or right of ``x[-1]`` equal 0.
    """
    x = _as_real_array(x)
    p = x.size
    starts = _to_dtype(np.asarray(grid, dtype=float)[:-1], x.dtype)
    out = np.zeros((starts.size, p), dtype=x.dtype)
    out[starts < x[0], 0] = 1
    inner = (starts >= x[0]) & (starts < x[-1])
    if p == 1 or not np.any(inner):
        return out
    # the kernel is the sum of all order-p B-splines on the knots (X^p, x),
    # for any X < x[0]; X only enters through bounded ratios
    X = x[0] - max(1, x[-1] - x[0])
    knots = np.concatenate([np.full(p, X, dtype=x.dtype), x])
    pieces = _bspline_pieces(knots, p, starts[inner])
    out[inner] = pieces.sum(axis=0)
    return out


def _expansion_pieces(nodes, exponent, grid):
    """Pieces of ``[nodes] (. - t)_+^exponent`` via the derivative-weight expansion."""
    c = divided_difference_weights(nodes)
    starts, ends = grid[:-1], grid[1:]
    out = np.zeros((starts.size, exponent + 1))
    for i, lam in enumerate(nodes.distinct):
        active = lam >= ends            # lam - t > 0 on the whole interval
        for j in range(c.shape[1]):
            if c[i, j] == 0 or j > exponent:
                continue
            q = exponent - j
            w = c[i, j] * math.factorial(exponent) / math.factorial(q)
            for r in range(q + 1):
                out[active, r] += w * binom(q, r) * (lam - starts[active]) ** (q - r) * (-1) ** r
    return out


def spline_to_piecewise(nodes, kind="cumulative", grid=None, method="recurrence"):
    """Exact piecewise-polynomial form of a spline kernel.

    Parameters
    ----------
    nodes : NodeMultiset or sequence of float
    kind : {"cumulative", "basic"}
    grid : array_like, optional
        Breakpoints to use; must contain the distinct nodes. Defaults to the
        distinct nodes themselves.
    method : {"recurrence", "expansion"}
        Cox-de Boor recurrence (stable, default) or the explicit
        derivative-weight expansion of the divided difference.
    """
    nodes = NodeMultiset.coerce(nodes)
    grid = _grid_for(nodes, grid)
    x = nodes.nodes
    if kind == "cumulative":
        if nodes.all_equal or method == "recurrence":
            coeffs = cumulative_kernel_pieces(x, grid)
        else:
            coeffs = _expansion_pieces(nodes, nodes.n - 1, grid)
        return PiecewisePolynomial(grid, coeffs, 1.0, 0.0)
    if kind == "basic":
        if nodes.all_equal:
            raise DegenerateSplineError("basic spline needs at least two distinct nodes")
        if method == "recurrence":
            starts = grid[:-1]
            inner = (starts >= x[0]) & (starts < x[-1])
            coeffs = np.zeros((starts.size, nodes.n - 1))
            pieces = _bspline_pieces(x, nodes.n - 1, starts[inner])
            coeffs[inner] = pieces[0] / (x[-1] - x[0])
        else:
            coeffs = _expansion_pieces(nodes, nodes.n - 2, grid)
        return PiecewisePolynomial(grid, coeffs, 0.0, 0.0)
    raise DomainError(f"unknown spline kind {kind!r}")
