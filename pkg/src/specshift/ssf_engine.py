"""Spectral shift densities of every order.

Order 1 is the Krein function, built from eigenvalue counting alone. Higher
orders follow the recursion

    eta_p(t) = tr(V^{p-1})/(p-1)! - nu_{p-1}((-inf, t))
               - 1/(p-1)! * sum_atoms w * [l_1..l_{p-1}] (. - t)_+^{p-2}

with ``d nu_q = eta_q dt``, evaluated exactly on piecewise polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SymmetryViolationError
from .multimeasure import kernel_from_groups, kernel_integral_to_piecewise
from .pair import EXTENDED_DPS, PRECISIONS, as_pair, choose_precision
from .piecewise import PiecewisePolynomial, piecewise_integrate

__all__ = [
    "SSFDensity",
    "AsymptoticsReport",
    "krein_xi",
    "eta_recursive",
    "eta_sequence",
    "cumulative",
    "trace_formula_rhs",
    "asymptotics_report",
    "choose_precision",
]

# tolerance for the exact left-tail cancellation, relative to tr|V|^{p-1}
_CANCEL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SSFDensity:
    """Density ``eta_p`` of the order-``p`` spectral shift measure.

    Attributes
    ----------
    order : int
    density : PiecewisePolynomial
        Compactly supported (both tails are exactly zero).
    mass : float
        Exact integral of ``density``.
    breakpoint_provenance : tuple of str
        For each breakpoint: ``"H0"``, ``"H0+V"`` or ``"both"``.
    tail_residuals : tuple of float
        Values the left and right tails took before being set to zero.
        The left one cancels by construction; the right one is the mass
        identity defect at order ``p - 1``.
    """

    order: int
    density: PiecewisePolynomial
    mass: float
    breakpoint_provenance: tuple = ()
    tail_residuals: tuple = (0.0, 0.0)
    meta: dict = field(default_factory=dict)

    def __call__(self, t):
        return self.density(t)


@dataclass(frozen=True)
class AsymptoticsReport:
    left_limit: float
    right_limit: float
    support: tuple | None
    predicted_right_limit: float
    consistent: bool


def _provenance(grid, e0, e1, tol):
    tags = []
    for g in grid:
        a = bool(np.any(np.abs(e0 - g) <= tol))
        b = bool(np.any(np.abs(e1 - g) <= tol))
        tags.append("both" if a and b else ("H0" if a else "H0+V"))
    return tuple(tags)


def _spectrum1(pair, extended):
    return pair.xi_offsets_extended()[0] if extended else pair.D1.eigenvalues


def _joint_grid(pair, extended=False):
    return np.union1d(pair.D0.eigenvalues, _spectrum1(pair, extended))


def _xi_pieces(pair, extended):
    D0, D1 = pair.D0, pair.D1
    e1 = _spectrum1(pair, extended)
    grid = _joint_grid(pair, extended)
    if len(grid) < 2:
        return PiecewisePolynomial(grid, np.zeros((0, 1), dtype=object if extended else float))
    mid = 0.5 * (grid[:-1] + grid[1:])
    c0 = np.concatenate([[0], np.cumsum(D0.multiplicities)])
    c1 = np.concatenate([[0], np.cumsum(D1.multiplicities)])
    n0 = c0[np.searchsorted(D0.eigenvalues, mid, side="left")]
    n1 = c1[np.searchsorted(e1, mid, side="left")]
    vals = (n0 - n1).astype(float)
    if extended:
        import mpmath
        vals = np.array([mpmath.mpf(float(v)) for v in vals], dtype=object)
    return PiecewisePolynomial.constant_pieces(grid, vals)


def krein_xi(H0, V=None):
    """Krein's function ``xi(t) = N_{H0}(t) - N_{H0+V}(t)`` as an order-1 density.

    ``N_H(t)`` counts eigenvalues strictly below ``t``; with this sign
    ``tr(f(H0+V) - f(H0)) = int f' xi``.
    """
    pair = as_pair(H0, V)
    dens = _xi_pieces(pair, False)
    grid = dens.breakpoints
    return SSFDensity(1, dens, float(dens.integral()),
                      _provenance(grid, pair.D0.eigenvalues, pair.D1.eigenvalues, 0.0),
                      meta={"precision": "double"})


def cumulative(S, t):
    """``nu((-inf, t))`` for the measure ``S.density dt``."""
    return S.density.antiderivative()(t)


def _offset_steps(pair, extended, q):
    # Moving a jump of xi from its stored breakpoint h to the refined value
    # h + l adds m * chi_[h, h+l) = m * (l delta - l^2/2 delta' + ...) to nu_1.
    # Carried through the recursion, the order-q antiderivative picks up the
    # step m * l^q / q! at h.
    if extended:
        e1, off = pair.xi_offsets_extended()
    else:
        e1, off = pair.D1.eigenvalues, pair.xi_offsets()
    fq = math.factorial(q)
    a = np.array([int(m) * o ** q / fq for m, o in zip(pair.D1.multiplicities, off)],
                 dtype=object if extended else float)
    c = np.cumsum(a)
    return PiecewisePolynomial.constant_pieces(e1, c[:-1], 0 * c[-1], c[-1])


def _next_order(pair, prev, extended):
    """``eta_{q+1}`` from the raw piecewise ``eta_q`` (same precision)."""
    q = prev.order if isinstance(prev, SSFDensity) else prev[0]
    prev_pp = prev.density if isinstance(prev, SSFDensity) else prev[1]
    p = q + 1
    fact = math.factorial(q)
    if extended:
        import mpmath
        with mpmath.workdps(EXTENDED_DPS):
            keys, sums = pair.measure_extended(q)
            K = kernel_from_groups(pair.D0.eigenvalues, keys, sums, q) / fact
            eta, left_res, right_res = _assemble(pair, q, K, prev_pp, True)
    else:
        K = kernel_integral_to_piecewise(pair.measure(q)) / fact
        eta, left_res, right_res = _assemble(pair, q, K, prev_pp, False)
    scale = pair.abs_trace_power(q) / fact + 1e-300
    if abs(left_res) > _CANCEL_TOL * scale:
        raise SymmetryViolationError(
            f"order {p}: left tail {left_res:.3e} fails to cancel (scale {scale:.3e})")
    return eta, (left_res, right_res), scale


def _assemble(pair, q, K, prev_pp, extended):
    # tr(V^q) equals the total weight of the order-q measure; taking the
    # measure's own total makes the left-tail cancellation exact
    const = K.left_tail
    F = prev_pp.antiderivative()
    F = F + _offset_steps(pair, extended, q)
    eta = (const - F) - K
    eta = eta.refine(np.union1d(eta.breakpoints, _joint_grid(pair, extended)))
    left_res, right_res = float(eta.left_tail), float(eta.right_tail)
    # structural tails: left cancels exactly, right is the order-q mass defect
    zero = eta.coefficients.dtype.type(0) if not extended else 0
    eta = PiecewisePolynomial(eta.breakpoints, eta.coefficients, zero, zero)
    return eta, left_res, right_res


def eta_sequence(H0, V=None, p=2, precision="auto"):
    """``[eta_1, ..., eta_p]`` (memoised on the pair).

    Parameters
    ----------
    precision : {"auto", "double", "extended"}
        ``extended`` runs the recursion and the measure weights with mpmath
        at ``EXTENDED_DPS`` digits and rounds the finished densities to
        double. ``auto`` picks it when the spectrum is wide enough for the
        repeated antiderivatives to amplify double rounding beyond ``1e-10``.
    """
    pair = as_pair(H0, V)
    if p < 1:
        raise DomainError("order must be at least 1")
    if precision not in PRECISIONS:
        raise DomainError(f"unknown precision {precision!r}")
    if precision == "auto":
        precision = choose_precision(pair, p)
    extended = precision == "extended"
    memo = pair._etas if not extended else pair._ext.setdefault("etas", [])
    if not memo:
        memo.append((1, _xi_pieces(pair, extended), krein_xi(pair)))
    zero_v = not np.any(pair.V.matrix)
    while len(memo) < p:
        q, raw, _ = memo[-1]
        if zero_v:
            # every remainder vanishes; skip the recursion and its rounding residue
            b = raw.breakpoints
            eta = PiecewisePolynomial(b, np.zeros((max(len(b) - 1, 0), q + 1)))
            residuals, scale = (0.0, 0.0), 0.0
        else:
            eta, residuals, scale = _next_order(pair, (q, raw), extended)
        dens = eta.to_float() if extended else eta
        e0, e1 = pair.D0.eigenvalues, _spectrum1(pair, extended)
        mass = eta.integral()
        S = SSFDensity(q + 1, dens, float(mass),
                       _provenance(dens.breakpoints, e0, e1, 0.0), residuals,
                       {"scale": scale, "precision": precision})
        memo.append((q + 1, eta, S))
    return [entry[2] for entry in memo[:p]]


def eta_recursive(H0, V=None, p=2, precision="auto"):
    """Spectral shift density of order ``p`` (``p = 1`` gives Krein's xi)."""
    return eta_sequence(H0, V, p, precision)[-1]


def trace_formula_rhs(S, f):
    """``int f^{(p)}(t) eta_p(t) dt`` in closed form."""
    return piecewise_integrate(S.density, f, S.order)


def asymptotics_report(S):
    """Tail values of the piecewise density and the predicted right limit.

    The predicted right limit is ``tr(V^{p-1})/(p-1)! - nu_{p-1}(R)``,
    recorded while building ``S``; in finite dimensions it is zero up to
    rounding.
    """
    left = float(S.density.left_tail)
    right = float(S.density.right_tail)
    predicted = float(S.tail_residuals[1])
    sup = S.density.support()
    scale = S.meta.get("scale", 1.0)
    ok = left == 0.0 and right == 0.0 and abs(predicted) <= 1e-10 * max(scale, 1.0)
    return AsymptoticsReport(left, right, sup, predicted, ok)
