import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import exact_gateaux_trace, exact_remainder_trace
from specshift.ensembles import ensemble, random_pair, wide_spectrum_pair
from specshift.functions import Polynomial, ResolventPower, f_z
from specshift.operator_core import spectral_decompose
from specshift.pair import Perturbation
from specshift.taylor_remainder import (fd_derivative, fd_remainder_trace, gateaux_trace, remainder,
                                        remainder_operator, remainder_trace, trace_path)

ZS = (1j, 2 + 1j, -3 + 0.5j)


def test_scalar_examples():
    f = f_z(2j)
    ref = 1 / (2j - 1) - 1 / 2j - 1 / (2j) ** 2
    assert remainder_trace([[0.0]], [[1.0]], f, 2) == pytest.approx(ref, abs=1e-15)
    np.testing.assert_allclose(remainder_operator([[0.0]], [[1.0]], f, 2), [[ref]], atol=1e-15)
    D = spectral_decompose([[0.0]])
    assert gateaux_trace(D, [[1.0]], f_z(1j), 2) == pytest.approx(1j)


def test_trivial_cases(small_pairs):
    H, V = small_pairs[0]
    D = spectral_decompose(H)
    assert gateaux_trace(D, V, Polynomial((0.0, 1.0)), 1) == pytest.approx(np.trace(V))
    for j in (1, 2, 3):
        assert abs(gateaux_trace(D, V, Polynomial((4.0,)), j)) < 1e-14
    f = f_z(1j)
    np.testing.assert_allclose(remainder_operator(H, V, f, 1),
                               np.linalg.inv(1j * np.eye(len(H)) - H - V) - np.linalg.inv(1j * np.eye(len(H)) - H),
                               atol=1e-13)
    Z = np.zeros_like(V)
    for p in (1, 3):
        assert np.abs(remainder_operator(H, Z, f, p)).max() == 0
        assert abs(fd_remainder_trace(H, Z, f, p)) < 1e-15
    assert abs(remainder_trace(H, V, Polynomial((1.0, 2.0, 3.0)), 3)) < 1e-12
    assert abs(fd_remainder_trace([[0.0]], [[1.0]], Polynomial((0.0, 0.0, 1.0)), 3)) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_remainder_against_exact_series(k, small_pairs):
    for H, V in small_pairs[:4]:
        for p in range(1, 6):
            for z in ZS:
                ref = exact_remainder_trace(H, V, z, p, k)
                val = remainder_trace(H, V, ResolventPower(z, k), p)
                assert abs(val - ref) <= 1e-9 * abs(ref) + 1e-15


def test_gateaux_against_exact_series(small_pairs):
    for H, V in small_pairs[:3]:
        D = spectral_decompose(H)
        for j in range(1, 5):
            ref = exact_gateaux_trace(H, V, 2 + 1j, j)
            assert abs(gateaux_trace(D, V, f_z(2 + 1j), j) - ref) <= 1e-11 * abs(ref)


def test_methods_agree(small_pairs):
    for H, V in small_pairs:
        for p in (1, 2, 4):
            a = remainder(H, V, f_z(2 + 1j), p, method="multilinear").value_trace
            b = remainder(H, V, f_z(2 + 1j), p, method="spectral").value_trace
            assert abs(a - b) <= 1e-9 * abs(a)


def test_fd_oracle(small_pairs):
    for H, V in small_pairs[:3]:
        for p in (1, 2, 3, 4):
            ref = remainder_trace(H, V, f_z(2 + 1j), p)
            assert abs(fd_remainder_trace(H, V, f_z(2 + 1j), p, h=1e-2) - ref) <= 1e-6 * abs(ref)


def test_fd_derivative_of_polynomial():
    g = lambda t: 1 + 2 * t - t ** 3 + 0.5 * t ** 5
    assert fd_derivative(g, 1, 0.05) == pytest.approx(2, rel=1e-10)
    assert fd_derivative(g, 3, 0.05) == pytest.approx(-6, rel=1e-8)


def test_trace_path_matches_double():
    H, V = random_pair(4, np.random.default_rng(3))
    f = f_z(1j)
    g_mp, g_d = trace_path(H, V, f), trace_path(H, V, f, dps=None)
    for t in (0.0, 0.3, 1.0):
        ref = np.trace(np.linalg.inv(1j * np.eye(4) - H - t * V))
        assert abs(g_mp(t) - ref) < 1e-12 and abs(g_d(t) - ref) < 1e-12


def test_recursion_operator_identity(small_pairs):
    z = 1j
    for H, V in small_pairs:
        n = len(H)
        R = np.linalg.inv(z * np.eye(n) - H)
        RV = R @ V
        for p in range(1, 5):
            lhs = remainder_operator(H, V, f_z(z), p + 1)
            rhs = remainder_operator(H, V, f_z(z), p) - np.linalg.matrix_power(RV, p) @ R
            assert np.linalg.norm(lhs - rhs) <= 1e-11 * max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)


def test_wide_spectrum_uses_extended_precision():
    rng = np.random.default_rng(5)
    for n in (3, 5):
        H, V = wide_spectrum_pair(n, rng, 1e4)
        pair = Perturbation(H, V)
        for p in (2, 4):
            ref = exact_remainder_trace(H, V, 1j, p)
            assert abs(remainder_trace(pair, None, f_z(1j), p) - ref) <= 1e-9 * abs(ref)
            assert abs(np.trace(remainder_operator(pair, None, f_z(1j), p)) - ref) <= 1e-9 * abs(ref)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_remainder_property(n, p, seed):
    H, V = random_pair(n, np.random.default_rng(seed))
    z = 0.5 + 1j
    ref = exact_remainder_trace(H, V, z, p)
    assert abs(remainder_trace(H, V, f_z(z), p) - ref) <= 1e-9 * abs(ref) + 1e-15
