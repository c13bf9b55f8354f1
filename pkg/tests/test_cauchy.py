import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specshift.cauchy import (MeasureSpec, cauchy_derivative, cauchy_transform, herglotz_constants,
                              integration_by_parts_check, log_boundary_value, log_transform, stieltjes_invert)
from specshift.divdiff import cumulative_spline_kernel, spline_to_piecewise
from specshift.errors import DomainError
from specshift.piecewise import PiecewisePolynomial
from specshift.taylor_remainder import remainder_trace

UNIFORM = MeasureSpec.from_density(PiecewisePolynomial.constant_pieces([0.0, 1.0], [1.0]))
TRIANGLE = MeasureSpec.from_density(PiecewisePolynomial([0.0, 1.0], [[1.0, -1.0]]))


def test_transform_examples():
    z = 0.3 + 0.7j
    assert cauchy_transform(MeasureSpec.point_mass(0.0), z) == pytest.approx(1 / z)
    ref = cmath.log(z) - cmath.log(z - 1) + math.log(2) / 2
    assert cauchy_transform(UNIFORM, z) == pytest.approx(ref, abs=1e-14)
    assert cauchy_transform(MeasureSpec(), z) == 0
    with pytest.raises(DomainError):
        cauchy_transform(UNIFORM, 0.5)


def test_derivative_examples():
    z = -0.4 + 1.1j
    assert cauchy_derivative(MeasureSpec.point_mass(0.0), z, 1) == pytest.approx(-1 / z ** 2)
    assert cauchy_derivative(MeasureSpec(), z, 3) == 0
    # density (1 - t) on (0, 1): int 2 (1 - t) / (z - t)^3 dt is the scalar p = 2 remainder
    val = cauchy_derivative(TRIANGLE, z, 2)
    assert val == pytest.approx(remainder_trace([[0.0]], [[1.0]], __import__("specshift").f_z(z), 2), abs=1e-14)


def test_derivative_matches_finite_difference():
    z, h = 0.2 + 0.9j, 1e-4
    G = lambda w: cauchy_transform(TRIANGLE, w)
    fd = (G(z + h) - G(z - h)) / (2 * h)
    assert abs(cauchy_derivative(TRIANGLE, z, 1) - fd) < 1e-7


def test_stieltjes_examples():
    G = lambda w: cauchy_transform(UNIFORM, w)
    r = stieltjes_invert(G, 0.5)
    # Poisson smoothing of the indicator: error ~ (2/pi) eps / 0.5
    assert abs(r.value - 1) <= 4 / math.pi * r.eps[-1]
    assert r.converged
    r = stieltjes_invert(G, -5.0)
    assert abs(r.value) <= r.eps[-1]
    r = stieltjes_invert(lambda w: cauchy_transform(MeasureSpec.point_mass(0.0), w), 0.0)
    assert not r.converged
    assert r.estimates[-1] == pytest.approx(1 / (math.pi * r.eps[-1]))
    with pytest.raises(DomainError):
        stieltjes_invert(G, 0.5, (1e-3, 1e-2))


def test_integration_by_parts_examples():
    assert integration_by_parts_check(MeasureSpec.point_mass(0.0), 1j).residual <= 1e-12
    assert integration_by_parts_check(UNIFORM, 2j).residual <= 1e-10
    r = integration_by_parts_check(MeasureSpec(), 1j)
    assert r.lhs == 0 and r.rhs == 0


def test_log_transform_examples():
    z = 0.4 + 0.3j
    # int_0^1 log(z - t) dt = z log z - (z - 1) log(z - 1) - 1
    ref = z * cmath.log(z) - (z - 1) * cmath.log(z - 1) - 1
    assert log_transform([0.0, 1.0], z) == pytest.approx(ref, abs=1e-14)
    assert log_transform([0.0, 1.0], 1j).imag > 0
    v = [log_boundary_value([0.0, 1.0], 0.5, e) for e in (1e-3, 5e-4, 2.5e-4)]
    r1, r2 = 2 * v[1] - v[0], 2 * v[2] - v[1]
    assert abs((4 * r2 - r1) / 3 - 0.5) < 1e-6


def test_herglotz_normalisation():
    # h = a + b z - G with the regularised G has Re h(i) = a, and b = 0 for finite measures
    m = MeasureSpec(((0.3, 0.5),), spline_to_piecewise([0.0, 1.0, 2.5], "basic"))
    a, slopes = herglotz_constants(lambda z: 0.7 - cauchy_transform(m, z))
    assert a == pytest.approx(0.7, abs=1e-14)
    assert abs(slopes[1]) < abs(slopes[0]) < 1e-2
    a, slopes = herglotz_constants(lambda z: 0.7 + 2.0 * z - cauchy_transform(m, z))
    assert a == pytest.approx(0.7, abs=1e-14) and slopes[1] == pytest.approx(2.0, abs=1e-3)


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6), st.floats(-3, 3), st.floats(0.05, 3))
def test_herglotz_sign_and_ibp(nodes, re, im):
    if np.ptp(nodes) < 1e-3:
        nodes = [nodes[0], nodes[0] + 1.0]
    m = MeasureSpec(((0.1, 0.4),), spline_to_piecewise(nodes, "basic"))
    z = complex(re, im)
    assert cauchy_transform(m, z).imag < 0
    r = integration_by_parts_check(m, z)
    assert r.residual <= 1e-9 * max(abs(r.lhs), 1.0) / min(im, 1.0) ** 2


@given(st.lists(st.integers(-40, 40).map(lambda i: i * 0.1), min_size=2, max_size=6))
def test_log_boundary_property(nodes):
    if len(set(nodes)) < 2:
        nodes = nodes + [nodes[0] + 1.0]
    p = len(nodes)
    x = np.array(sorted(set(nodes)))
    cand = np.linspace(x[0] - 0.5, x[-1] + 0.5, 200)
    cand = cand[np.min(np.abs(cand[:, None] - x[None, :]), axis=1) >= 0.05]
    for t in cand[:: max(len(cand) // 10, 1)]:
        v = [log_boundary_value(nodes, t, e) for e in (1e-3, 5e-4, 2.5e-4)]
        r1, r2 = 2 * v[1] - v[0], 2 * v[2] - v[1]
        assert abs((4 * r2 - r1) / 3 - cumulative_spline_kernel(nodes, t) / (p - 1)) < 1e-6
