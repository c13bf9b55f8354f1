import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import basic_spline_ref, divided_difference_distinct, resolvent_dd_confluent
from specshift.divdiff import (NodeMultiset, basic_spline, cumulative_spline_kernel, divided_difference,
                               divided_difference_resolvent, divided_differences, spline_to_piecewise)
from specshift.errors import DegenerateSplineError, PoleCollisionError
from specshift.functions import Exponential, Polynomial, ResolventPower, f_z

node_lists = st.lists(st.floats(-3, 3, allow_nan=False), min_size=2, max_size=7)
# lattice nodes: either exactly equal or at least 0.05 apart, where the
# recursive table keeps its accuracy
lattice_nodes = st.lists(st.integers(-60, 60).map(lambda i: i * 0.05), min_size=2, max_size=7)


def with_repeats(draw_nodes, repeat):
    x = list(draw_nodes)
    if repeat:
        x[1] = x[0]
    return x


def test_examples():
    assert divided_difference(Polynomial((0, 0, 1)), [0, 1, 2]) == pytest.approx(1)
    assert divided_difference(f_z(1j), [0, 0]) == pytest.approx(-1)
    assert divided_difference(f_z(2j), [0, 1]) == pytest.approx(-0.2 + 0.1j)
    assert divided_difference_resolvent(2j, 1, [0, 1]) == pytest.approx(-0.2 + 0.1j, abs=1e-12)
    assert divided_difference_resolvent(1j, 1, [0, 0, 0]) == pytest.approx(1j)
    assert divided_difference_resolvent(1j, 2, [0]) == pytest.approx(-1)


def test_kernel_examples():
    assert cumulative_spline_kernel([2, 2, 2], 1.5) == 1
    assert cumulative_spline_kernel([2, 2, 2], 2.0) == 0
    assert cumulative_spline_kernel([0, 1], 0.5) == pytest.approx(0.5)
    assert cumulative_spline_kernel([0, 1, 3], -0.1) == 1
    assert cumulative_spline_kernel([0, 1, 3], 3.0) == 0
    assert basic_spline([0, 1], 0.5) == pytest.approx(1)
    assert basic_spline([0, 1, 3], 1.0) == pytest.approx(1 / 3)
    assert basic_spline([0, 1, 3], 5.0) == 0


def test_spline_to_piecewise_examples():
    C = spline_to_piecewise([0, 1], "cumulative")
    np.testing.assert_array_equal(C.breakpoints, [0, 1])
    np.testing.assert_allclose(C(np.array([-1.0, 0.0, 0.25, 1.0, 2.0])), [1, 1, 0.75, 0, 0])
    B = spline_to_piecewise([0, 1, 3], "basic")
    assert B(1.0) == pytest.approx(1 / 3)
    assert B.integral() == pytest.approx(0.5, abs=1e-15)
    S = spline_to_piecewise([5, 5], "cumulative")
    np.testing.assert_array_equal(S(np.array([4.9, 5.0, 5.1])), [1, 0, 0])
    with pytest.raises(DegenerateSplineError):
        spline_to_piecewise([2, 2, 2], "basic")


def test_pole_collision():
    with pytest.raises(PoleCollisionError):
        divided_difference(ResolventPower(1 + 1e-14j), [1.0, 2.0])


@given(lattice_nodes, st.booleans(), st.floats(-3, 3), st.floats(0.5, 2), st.integers(1, 3))
def test_symmetry(x, repeat, re, im, k):
    x = with_repeats(x, repeat)
    f = ResolventPower(complex(re, im), k)
    a = divided_difference(f, x)
    b = divided_difference(f, x[::-1], method="recursive")
    assert abs(a - b) <= 1e-10 * abs(a)


@given(node_lists, st.booleans(), st.floats(-3, 3), st.floats(0.5, 2), st.integers(1, 3))
def test_closed_form_vs_oracle(x, repeat, re, im, k):
    x = with_repeats(x, repeat)
    a = divided_difference(ResolventPower(complex(re, im), k), x)
    ref = resolvent_dd_confluent(complex(re, im), k, x)
    assert abs(a - ref) <= 1e-12 * abs(ref)


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6, unique=True), st.floats(0.5, 2))
def test_exponential_against_symmetric_sum(x, s):
    assume(np.min(np.diff(np.sort(x))) > 0.2)
    f = Exponential(s)
    ref = divided_difference_distinct(lambda v: mpmath.expj(s * v), x)
    assert abs(divided_difference(f, x) - ref) <= 1e-9 * max(abs(ref), 1e-3)


@given(st.integers(1, 6), st.lists(st.floats(-1, 1), min_size=6, max_size=6), node_lists)
def test_leading_coefficient(n, lower, x):
    x = (x * 4)[: n + 1]
    assume(len(x) == n + 1)
    coef = tuple(lower[:n]) + (1.0,)
    assert abs(divided_difference(Polynomial(coef), x) - 1) <= 1e-12
    if n >= 2:
        assert abs(divided_difference(Polynomial(coef[:-1]), x)) <= 1e-12


@given(node_lists, st.booleans())
def test_basic_spline_vs_scipy(x, repeat):
    x = np.sort(with_repeats(x, repeat))
    assume(np.ptp(x) > 1e-3)
    # scipy needs knot multiplicities of at most the spline order
    _, counts = np.unique(x, return_counts=True)
    assume(counts.max() < len(x) - 1 or len(x) == 2)
    t = np.linspace(x[0] - 0.5, x[-1] + 0.5, 41)
    # scipy closes the last knot interval on the right; compare off the knots
    t = t[np.min(np.abs(t[:, None] - x[None, :]), axis=1) > 1e-9]
    ours = np.array([basic_spline(x, s) for s in t])
    np.testing.assert_allclose(ours, basic_spline_ref(x, t), atol=1e-9 / np.ptp(x))
    B = spline_to_piecewise(x, "basic")
    assert abs(B.integral() - 1 / (len(x) - 1)) <= 1e-10
    assert np.all(ours >= -1e-12)


def test_right_continuity_at_nodes():
    assert basic_spline([0, 1], 0.0) == 1.0 and basic_spline([0, 1], 1.0) == 0.0
    x = [0.0, 0.0, 1.0]
    P = spline_to_piecewise(x, "basic")
    for t in (0.0, 1.0):
        assert basic_spline(x, t) == pytest.approx(P(t))
    assert basic_spline(x, 0.0) == pytest.approx(1.0)


def test_confluent_limit_is_first_order():
    f = f_z(0.5 + 1j)
    exact = f.derivative(0.0, 1)
    errs = [abs(divided_difference(f, [0.0, d]) - exact) for d in (1e-3, 1e-4)]
    assert errs[1] < errs[0] / 5
    assert errs[0] < 1e-2


def test_closed_form_beats_recursion_at_small_separation():
    z = 0.3 + 0.7j
    for d in (1e-3, 1e-5, 1e-7):
        x = [0.0, d, 2 * d, 3 * d]
        ref = resolvent_dd_confluent(z, 1, x)
        assert abs(divided_difference_resolvent(z, 1, x) - ref) <= 1e-13 * abs(ref)
    assert np.isfinite(divided_difference_resolvent(z, 2, [0.0, 1e-12, 2e-12]))


def test_batch_rows():
    f = f_z(1j)
    X = np.array([[0.0, 1.0], [2.0, 2.0]])
    np.testing.assert_allclose(divided_differences(f, X),
                               [divided_difference(f, X[0]), divided_difference(f, X[1])])
    assert NodeMultiset([1, 0, 1]).n == 3
