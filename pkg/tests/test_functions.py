import math

import mpmath
import numpy as np
import pytest

from specshift.errors import DomainError
from specshift.functions import Exponential, Polynomial, ResolventPower, TruncatedPower, f_z, truncated_power


def test_truncated_power_examples():
    assert truncated_power(2.0, 3) == 8
    assert truncated_power(-1.0, 2) == 0
    assert truncated_power(0.0, 0) == 1


@pytest.mark.parametrize("f", [ResolventPower(1 + 2j, 2), Polynomial((1.0, -2.0, 0.5, 3.0)),
                               Exponential(1.3), TruncatedPower(0.2, 4)])
def test_derivatives_match_mpmath(f):
    x = 0.7
    for j in range(4):
        ref = complex(mpmath.diff(lambda s: f.mp_derivative(s, 0), mpmath.mpf(x), j))
        assert abs(complex(f.derivative(x, j)) - ref) <= 1e-9 * (abs(ref) + 1)
        assert abs(complex(f.mp_derivative(mpmath.mpf(x), j)) - ref) <= 1e-9 * (abs(ref) + 1)


def test_linear_combination():
    g = 2.0 * f_z(1j) - Polynomial((0.0, 1.0))
    assert g(0.5) == pytest.approx(2 / (1j - 0.5) - 0.5)
    assert g.derivative(0.5, 1) == pytest.approx(2 / (1j - 0.5) ** 2 - 1)


def test_resolvent_validation():
    with pytest.raises(DomainError):
        f_z(1.0)
    with pytest.raises(DomainError):
        ResolventPower(1j, 0)
    assert math.isclose(abs(f_z(1j)(0.0)), 1.0)
