"""Cauchy transforms of discrete plus piecewise-polynomial measures.

The regularised transform of a measure ``nu`` is

    G(z) = int (1/(z - t) + t/(t^2 + 1)) dnu(t),

so that measures with constant tails are allowed. Everything here uses
closed-form antiderivatives; no quadrature is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .divdiff import NodeMultiset, spline_to_piecewise
from .errors import DegenerateSplineError, DomainError
from .functions import f_z
from .piecewise import PiecewisePolynomial, log_moments, piecewise_integrate

__all__ = [
    "MeasureSpec",
    "InversionResult",
    "IBPCheck",
    "cauchy_transform",
    "cauchy_derivative",
    "stieltjes_invert",
    "integration_by_parts_check",
    "log_transform",
    "log_boundary_value",
    "herglotz_constants",
]


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    """Finite atoms plus an optional piecewise-polynomial density.

    Attributes
    ----------
    atoms : tuple of (location, weight)
    density : PiecewisePolynomial, optional
        Constant tails are allowed; they integrate against the regularised
        kernel in closed form.
    """

    atoms: tuple = ()
    density: Optional[PiecewisePolynomial] = None

    def __post_init__(self):
        atoms = tuple((float(a), float(w)) for a, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_density(cls, density):
        return cls((), density)

    @classmethod
    def point_mass(cls, location, weight=1.0):
        return cls(((location, weight),))

    def total_variation(self):
        tv = sum(abs(w) for _, w in self.atoms)
        if self.density is not None:
            P = self.density
            if not P.is_supported():
                return math.inf
            tv += float(_abs_integral(P))
        return tv

    def mass(self):
        m = sum(w for _, w in self.atoms)
        if self.density is not None:
            m += float(np.real(self.density.integral()))
        return m

    def cumulative(self):
        """``F(t) = nu((-inf, t])`` as a piecewise polynomial (compact support only)."""
        F = PiecewisePolynomial.zero()
        if self.density is not None:
            F = self.density.antiderivative()
        for a, w in self.atoms:
            F = F + PiecewisePolynomial([a], np.zeros((0, 1)), 0.0, w)
        return F


def _abs_integral(P):
    # crude bound from sampled absolute values is not allowed here; integrate
    # |P| exactly by splitting pieces at their real roots
    total = 0.0
    for k in range(P.n_intervals):
        c = np.real(P.coefficients[k])
        L = P.widths[k]
        roots = np.roots(c[::-1]) if np.any(c[1:]) else np.array([])
        cuts = sorted({0.0, L, *[r.real for r in roots if abs(r.imag) < 1e-12 and 0 < r.real < L]})
        anti = np.concatenate([[0.0], c / np.arange(1, c.size + 1)])
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            total += abs(np.polyval(anti[::-1], u1) - np.polyval(anti[::-1], u0))
    return total


def _check_z(z):
    z = complex(z)
    if z.imag == 0:
        raise DomainError("the transform needs a nonreal argument")
    return z


def _split_tails(P):
    core = PiecewisePolynomial(P.breakpoints, P.coefficients, 0.0, 0.0)
    return core, P.left_tail, P.right_tail


def _regularised_tails(P, z):
    b = P.breakpoints
    if len(b) == 0:
        if P.left_tail != 0:
            raise DomainError("a nonzero constant density has no regularised transform")
        return 0j
    lo, hi = b[0], b[-1]
    s = 1.0 if z.imag > 0 else -1.0
    val = 0j
    if P.right_tail != 0:
        val += P.right_tail * (-1j * math.pi * s + np.log(z - hi) - 0.5 * math.log(hi * hi + 1.0))
    if P.left_tail != 0:
        val += P.left_tail * (-np.log(z - lo) + 0.5 * math.log(lo * lo + 1.0))
    return val


def cauchy_transform(m, z):
    """Regularised Cauchy transform ``G(z)`` of ``m``."""
    z = _check_z(z)
    G = 0j
    for a, w in m.atoms:
        G += w * (1.0 / (z - a) + a / (a * a + 1.0))
    if m.density is not None:
        core, _, _ = _split_tails(m.density)
        G += piecewise_integrate(core, f_z(z), 0)
        # t/(t^2+1) = -(f_i(t) + f_{-i}(t))/2
        G += -0.5 * (piecewise_integrate(core, f_z(1j), 0) + piecewise_integrate(core, f_z(-1j), 0))
        G += _regularised_tails(m.density, z)
    return complex(G)


def cauchy_derivative(m, z, k):
    """``G^{(k)}(z) = int (-1)^k k! (z - t)^{-(k+1)} dnu(t)`` for ``k >= 1``."""
    z = _check_z(z)
    if int(k) != k or k < 1:
        raise DomainError("derivative order must be a positive integer")
    sign = (-1) ** k
    val = 0j
    for a, w in m.atoms:
        val += w * sign * math.factorial(k) / (z - a) ** (k + 1)
    if m.density is not None:
        val += sign * piecewise_integrate(m.density, f_z(z), k)
    return complex(val)


@dataclass(frozen=True)
class InversionResult:
    """Stieltjes inversion estimate with its convergence record."""

    value: float
    estimates: tuple
    eps: tuple
    differences: tuple
    converged: bool

    def __float__(self):
        return self.value


def stieltjes_invert(G: Callable[[complex], complex], t: float,
                     eps_schedule: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3)):
    """``-Im G(t + i eps) / pi`` along a decreasing schedule of ``eps``.

    ``converged`` is False when successive differences grow, which is how an
    atom at ``t`` (estimates of size ``1/(pi eps)``) shows up.
    """
    eps = tuple(float(e) for e in eps_schedule)
    if not eps:
        raise DomainError("eps schedule must be nonempty")
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise DomainError("eps schedule must be positive and strictly decreasing")
    est = tuple(float(-np.imag(G(complex(t, e))) / math.pi) for e in eps)
    diffs = tuple(abs(b - a) for a, b in zip(est, est[1:]))
    if len(diffs) < 2:
        converged = True
    else:
        converged = all(d2 <= d1 * (1 + 1e-9) + 1e-14 for d1, d2 in zip(diffs, diffs[1:]))
    return InversionResult(est[-1], est, eps, diffs, converged)


@dataclass(frozen=True)
class IBPCheck:
    lhs: complex
    rhs: complex
    residual: float


def integration_by_parts_check(m, z):
    """Compare the unregularised transform with its integrated-by-parts form.

    ``lhs = G(z) - int t/(t^2+1) dnu = int dnu/(z - t)`` and
    ``rhs = -int F(t) (z - t)^(-2) dt`` with ``F`` the distribution function.
    """
    z = _check_z(z)
    if m.density is not None and not m.density.is_supported():
        raise DomainError("integration by parts needs a compactly supported measure")
    lhs = 0j
    for a, w in m.atoms:
        lhs += w / (z - a)
    if m.density is not None:
        lhs += piecewise_integrate(m.density, f_z(z), 0)
    F = m.cumulative()
    rhs = -piecewise_integrate(F, f_z(z), 1) if len(F.breakpoints) else 0j
    return IBPCheck(complex(lhs), complex(rhs), float(abs(lhs - rhs)))


def log_transform(nodes, z):
    """``J(z) = int log(z - t) [nodes] (. - t)_+^(p-2) dt`` for ``p`` nodes.

    The kernel is the basic spline on the nodes (at least two distinct).
    Principal branch; ``Im z > 0``.
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("log transform is taken in the upper half-plane")
    nodes = NodeMultiset.coerce(nodes)
    if nodes.all_equal:
        raise DegenerateSplineError("log transform needs at least two distinct nodes")
    P = spline_to_piecewise(nodes, "basic")
    if P.n_intervals == 0:
        return 0j
    mom = log_moments(z - P.breakpoints[:-1], P.widths, P.degree)
    return complex(np.sum(P.coefficients * mom))


def log_boundary_value(nodes, t, eps):
    """``Im J(t + i eps) / pi``; tends to ``[nodes] (. - t)_+^(p-1) / (p-1)``."""
    return log_transform(nodes, complex(t, eps)).imag / math.pi


def herglotz_constants(h, y=(1e3, 1e4)):
    """Estimate ``a = Re h(i)`` and ``b = lim h(iy)/(iy)`` of a Herglotz function.

    Returns ``(a, b_estimates)``; the slope estimates are listed per ``y`` so
    that the caller can judge convergence.
    """
    a = float(np.real(h(1j)))
    slopes = tuple(complex(h(1j * yy) / (1j * yy)) for yy in y)
    return a, slopes
