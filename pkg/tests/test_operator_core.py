import numpy as np
import pytest
from hypothesis import given, strategies as st

from specshift.errors import DomainError
from specshift.functions import Polynomial, f_z
from specshift.operator_core import (HermitianOperator, apply_function, counting_function, resolvent,
                                     schatten_norm, spectral_decompose, trace)
from specshift.ensembles import random_hermitian


def test_swap_matrix_projections():
    D = spectral_decompose([[0, 1], [1, 0]])
    np.testing.assert_allclose(D.eigenvalues, [-1, 1], atol=1e-14)
    np.testing.assert_allclose(D.projections[0], 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-14)
    np.testing.assert_allclose(D.projections[1], 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-14)


def test_multiplicities_and_clustering():
    D = spectral_decompose(np.diag([0.0, 0.0, 1.0]), cluster_tol=0.0)
    np.testing.assert_array_equal(D.eigenvalues, [0, 1])
    np.testing.assert_array_equal(D.multiplicities, [2, 1])
    D = spectral_decompose(np.diag([0.0, 1e-14, 1.0]), cluster_tol=1e-12)
    np.testing.assert_allclose(D.eigenvalues, [5e-15, 1.0], rtol=1e-12, atol=1e-28)
    np.testing.assert_array_equal(D.multiplicities, [2, 1])


def test_rejects_non_hermitian():
    with pytest.raises(DomainError):
        HermitianOperator([[0, 1], [0, 0]])
    with pytest.raises(DomainError):
        HermitianOperator([[1, 2, 3]])


def test_apply_function_examples():
    D = spectral_decompose(np.diag([0.0, 1.0]))
    np.testing.assert_allclose(apply_function(D, f_z(2j)), np.diag([1 / 2j, 1 / (2j - 1)]), atol=1e-15)
    D = spectral_decompose([[0, 1], [1, 0]])
    np.testing.assert_allclose(apply_function(D, Polynomial((0, 0, 1))), np.eye(2), atol=1e-14)
    np.testing.assert_allclose(apply_function(D, Polynomial((1,))), np.eye(2), atol=1e-14)


def test_resolvent_examples():
    np.testing.assert_allclose(resolvent(spectral_decompose([[3.0]]), 1j), [[1 / (1j - 3)]])
    D = spectral_decompose(np.diag([0.0, 1.0]))
    np.testing.assert_allclose(resolvent(D, 2j, 2), np.diag([1 / (2j) ** 2, 1 / (2j - 1) ** 2]), atol=1e-15)
    norms = [np.linalg.norm(resolvent(D, 1j * y), 2) for y in (1e1, 1e3, 1e5)]
    assert norms[0] > norms[1] > norms[2] and norms[2] < 1e-4
    with pytest.raises(DomainError):
        resolvent(D, 1.0)


def test_trace_and_counting(rng):
    assert trace(np.array([[1, 2], [2, 3]])) == 4
    A, B = rng.normal(size=(2, 5, 5))
    assert abs(trace(A @ B - B @ A)) < 1e-12 * np.abs(A).max() * np.abs(B).max() * 25
    D = spectral_decompose(np.diag([0.0, 0.0, 1.0]))
    assert counting_function(D, 0.5) == 2
    assert counting_function(D, -1) == 0
    assert counting_function(D, 2) == 3
    for P, m in zip(D.projections, D.multiplicities):
        assert abs(trace(P) - m) < 1e-12


def test_schatten():
    M = np.diag([3.0, -4.0])
    assert schatten_norm(M, 1) == pytest.approx(7)
    assert schatten_norm(M, 2) == pytest.approx(5)
    assert schatten_norm(M, np.inf) == pytest.approx(4)


@given(st.integers(1, 7), st.integers(0, 2**32 - 1), st.booleans())
def test_decomposition_invariants(n, seed, degenerate):
    H = random_hermitian(n, np.random.default_rng(seed), degenerate=degenerate)
    D = spectral_decompose(H)
    r = D.residuals(H)
    assert r["completeness"] < 1e-12 * n
    assert r["orthogonality"] < 1e-12 * n
    assert r["reconstruction"] < 1e-12 * max(np.abs(H).max(), 1) * n
    assert r["multiplicity"] == 0
    assert np.all(np.diff(D.eigenvalues) > 0)
