"""Test functions with closed-form derivatives of every order.

Every function the library integrates or differentiates is one of the
variants below, or a finite linear combination of them. Derivatives are
always taken with respect to the real variable ``x`` and are exact.

>>> f = f_z(2j)
>>> complex(f(0.0))
-0.5j
>>> complex(f.derivative(0.0, 1))    # d/dx (z - x)^-1 = (z - x)^-2
(-0.25+0j)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError

__all__ = [
    "FunctionSpec",
    "ResolventPower",
    "Polynomial",
    "Exponential",
    "TruncatedPower",
    "LinearCombination",
    "f_z",
    "rising_factorial",
]


def rising_factorial(k, j):
    """Return ``k (k+1) ... (k+j-1)`` (empty product is 1)."""
    out = 1
    for r in range(j):
        out *= k + r
    return out


class FunctionSpec:
    """Base class; subclasses implement :meth:`derivative`."""

    #: complex poles of the function (empty for entire functions)
    poles: tuple = ()

    def derivative(self, x, j):
        raise NotImplementedError

    def mp_derivative(self, x, j):
        """``j``-th derivative at a scalar ``mpmath`` point (current precision)."""
        raise NotImplementedError(f"no extended-precision form for {type(self).__name__}")

    def __call__(self, x):
        return self.derivative(x, 0)

    def terms(self):
        """Yield ``(coefficient, atomic_spec)`` pairs summing to ``self``."""
        yield 1.0, self

    def __add__(self, other):
        if not isinstance(other, FunctionSpec):
            return NotImplemented
        return LinearCombination(tuple(self.terms()) + tuple(other.terms()))

    def __mul__(self, c):
        if isinstance(c, FunctionSpec):
            return NotImplemented
        return LinearCombination(tuple((c * a, g) for a, g in self.terms()))

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-other)


@dataclass(frozen=True)
class ResolventPower(FunctionSpec):
    """``x -> (z - x)^(-k)`` with ``Im z != 0``."""

    z: complex
    k: int = 1

    def __post_init__(self):
        z = complex(self.z)
        if z.imag == 0.0:
            raise DomainError(f"resolvent power needs a nonreal z, got {z}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"power k must be a positive integer, got {self.k}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "k", int(self.k))

    @property
    def poles(self):
        return (self.z,)

    def derivative(self, x, j):
        x = np.asarray(x, dtype=float)
        return rising_factorial(self.k, j) * (self.z - x) ** (-(self.k + j))

    def mp_derivative(self, x, j):
        import mpmath
        return rising_factorial(self.k, j) * (mpmath.mpc(self.z) - x) ** (-(self.k + j))


def f_z(z):
    """The resolvent function ``x -> 1/(z - x)``."""
    return ResolventPower(z, 1)


@dataclass(frozen=True)
class Polynomial(FunctionSpec):
    """Polynomial with coefficients in ascending order of powers."""

    coefficients: tuple = field(default=(0.0,))

    def __post_init__(self):
        c = tuple(complex(a) if np.iscomplexobj(a) else float(a) for a in self.coefficients)
        object.__setattr__(self, "coefficients", c or (0.0,))

    @property
    def degree(self):
        c = np.trim_zeros(np.asarray(self.coefficients), "b")
        return max(len(c) - 1, 0)

    def coefficient_array(self, j=0):
        c = np.asarray(self.coefficients)
        if j:
            c = npoly.polyder(c, j) if len(c) > j else np.zeros(1, dtype=c.dtype)
        return c

    def derivative(self, x, j):
        x = np.asarray(x, dtype=float)
        return npoly.polyval(x, self.coefficient_array(j))

    def mp_derivative(self, x, j):
        import mpmath
        c = self.coefficient_array(j)
        return mpmath.polyval([mpmath.mpmathify(complex(a) if np.iscomplexobj(a) else float(a))
                               for a in c[::-1]], x)


@dataclass(frozen=True)
class Exponential(FunctionSpec):
    """``x -> exp(i s x)`` for real frequency ``s``."""

    s: float

    def __post_init__(self):
        object.__setattr__(self, "s", float(self.s))

    def derivative(self, x, j):
        x = np.asarray(x, dtype=float)
        return (1j * self.s) ** j * np.exp(1j * self.s * x)

    def mp_derivative(self, x, j):
        import mpmath
        return mpmath.mpc(0, self.s) ** j * mpmath.expj(self.s * x)


@dataclass(frozen=True)
class TruncatedPower(FunctionSpec):
    """``x -> (x - t)_+^k`` with the convention ``0^0 = 1``.

    Derivatives beyond order ``k`` are taken to vanish (the distributional
    part at ``x = t`` is ignored).
    """

    t: float
    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise DomainError(f"exponent must be a nonnegative integer, got {self.k}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "k", int(self.k))

    def derivative(self, x, j):
        x = np.asarray(x, dtype=float)
        if j > self.k:
            return np.zeros_like(x)
        coef = math.factorial(self.k) // math.factorial(self.k - j)
        return coef * truncated_power(x - self.t, self.k - j)

    def mp_derivative(self, x, j):
        if j > self.k or x < self.t:
            return 0 * x
        coef = math.factorial(self.k) // math.factorial(self.k - j)
        return coef * (x - self.t) ** (self.k - j)


def truncated_power(x, k):
    """``x^k`` for ``x >= 0`` and ``0`` otherwise; ``0^0 = 1``."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, x ** k, 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LinearCombination(FunctionSpec):
    """Finite linear combination of atomic function specs."""

    parts: tuple

    @property
    def poles(self):
        return tuple(p for _, g in self.parts for p in g.poles)

    def terms(self):
        yield from self.parts

    def derivative(self, x, j):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for c, g in self.parts:
            out = out + c * g.derivative(x, j)
        return out

    def mp_derivative(self, x, j):
        import mpmath
        return mpmath.fsum(mpmath.mpmathify(c) * g.mp_derivative(x, j) for c, g in self.parts)
