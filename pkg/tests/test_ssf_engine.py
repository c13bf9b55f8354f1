import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import exact_remainder_trace
from specshift.ensembles import random_pair
from specshift.functions import Polynomial, ResolventPower, f_z
from specshift.operator_core import counting_function, spectral_decompose
from specshift.ssf_engine import (asymptotics_report, cumulative, eta_recursive, eta_sequence, krein_xi,
                                  trace_formula_rhs)
from specshift.taylor_remainder import remainder_trace


def test_krein_xi_examples():
    S = krein_xi([[0.0]], [[1.0]])
    np.testing.assert_allclose(S(np.array([-0.5, 0.0, 0.5, 1.0])), [0, 1, 1, 0])
    S = krein_xi(np.diag([0.0, 1.0]), np.eye(2))
    np.testing.assert_allclose(S(np.array([-0.5, 0.5, 1.5, 2.5])), [0, 1, 1, 0])
    assert S.mass == pytest.approx(2)
    Z = krein_xi(np.diag([0.0, 1.0]), np.zeros((2, 2)))
    assert Z.mass == 0 and np.all(Z(np.linspace(-1, 2, 7)) == 0)


def test_scalar_higher_orders():
    S2, S3 = eta_sequence([[0.0]], [[1.0]], 3)[1:]
    t = np.array([-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5])
    inside = (t >= 0) & (t < 1)
    np.testing.assert_allclose(S2(t), np.where(inside, 1 - t, 0), atol=1e-15)
    np.testing.assert_allclose(S3(t), np.where(inside, (1 - t) ** 2 / 2, 0), atol=1e-15)
    assert S2.mass == pytest.approx(0.5) and S3.mass == pytest.approx(1 / 6)
    for p in (2, 3, 5):
        S = eta_recursive(np.diag([0.0, 2.0]), np.zeros((2, 2)), p)
        assert S.mass == 0 and np.all(S(np.linspace(-1, 3, 9)) == 0)


def test_cumulative_and_asymptotics():
    xi = krein_xi([[0.0]], [[1.0]])
    assert cumulative(xi, 0.5) == pytest.approx(0.5)
    assert cumulative(xi, -1) == 0
    assert cumulative(xi, 3) == pytest.approx(xi.mass)
    r = asymptotics_report(eta_recursive([[0.0]], [[1.0]], 2))
    assert (r.left_limit, r.right_limit) == (0, 0) and r.support == pytest.approx((0, 1)) and r.consistent
    r = asymptotics_report(krein_xi(np.diag([0.0, 1.0]), np.eye(2)))
    assert r.support == pytest.approx((0, 2))
    r = asymptotics_report(krein_xi(np.diag([0.0, 1.0]), np.zeros((2, 2))))
    assert r.support is None and r.left_limit == 0 and r.right_limit == 0


def test_trace_formula_scalar_and_polynomial():
    S = eta_recursive([[0.0]], [[1.0]], 2)
    f = f_z(2j)
    ref = remainder_trace([[0.0]], [[1.0]], f, 2)
    assert abs(trace_formula_rhs(S, f) - ref) <= 1e-10 * abs(ref)
    H, V = random_pair(4, np.random.default_rng(0))
    S4 = eta_recursive(H, V, 4)
    assert abs(trace_formula_rhs(S4, Polynomial((1.0, 2.0, 3.0, -1.0)))) < 1e-12


def test_xi_is_counting_difference():
    H, V = random_pair(5, np.random.default_rng(2))
    xi = krein_xi(H, V)
    D0, D1 = spectral_decompose(H), spectral_decompose(H + V)
    for t in np.linspace(-6, 6, 41):
        assert xi(t) == counting_function(D0, t) - counting_function(D1, t)
    z = 0.3 + 1j
    ref = np.trace(np.linalg.inv(z * np.eye(5) - H - V) - np.linalg.inv(z * np.eye(5) - H))
    assert abs(trace_formula_rhs(xi, f_z(z)) - ref) <= 1e-10 * abs(ref)


@given(st.integers(1, 6), st.integers(1, 5), st.integers(0, 2**32 - 1),
       st.sampled_from([1j, 2 + 1j, -3 + 0.5j]), st.integers(1, 3))
def test_trace_formula_property(n, p, seed, z, k):
    H, V = random_pair(n, np.random.default_rng(seed))
    S = eta_recursive(H, V, p)
    f = ResolventPower(z, k)
    ref = exact_remainder_trace(H, V, z, p, k)
    assert abs(trace_formula_rhs(S, f) - ref) <= 1e-7 * (abs(ref) + 1e-12)
    target = np.trace(np.linalg.matrix_power(V, p)).real / math.factorial(p)
    # mass can cancel for odd p; measure the error against tr|V|^p / p! then
    scale = max(abs(target), np.sum(np.abs(np.linalg.eigvalsh(V)) ** p) / math.factorial(p))
    assert abs(S.mass - target) <= 1e-9 * scale
    assert S.density.left_tail == 0 and S.density.right_tail == 0
    assert S.density.degree <= p - 1
