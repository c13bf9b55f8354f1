"""Seeded random Hermitian pairs for verification runs."""
from __future__ import annotations

import numpy as np

__all__ = ["random_unitary", "random_hermitian", "random_pair", "wide_spectrum_pair", "ensemble"]


def random_unitary(n, rng):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian(n, rng, eigenvalues=None, degenerate=False):
    """Hermitian matrix with the given (or random) spectrum.

    With ``degenerate=True`` a random eigenvalue is repeated.
    """
    if eigenvalues is None:
        eigenvalues = rng.uniform(-4.0, 4.0, size=n)
        if degenerate and n >= 2:
            i, j = rng.choice(n, size=2, replace=False)
            eigenvalues[j] = eigenvalues[i]
    U = random_unitary(n, rng)
    H = (U * np.asarray(eigenvalues, dtype=float)) @ U.conj().T
    return (H + H.conj().T) / 2


def _perturbation(n, rng, norm):
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    V = (B + B.conj().T) / 2
    return V * (norm / np.linalg.norm(V, 2))


def random_pair(n, rng, degenerate_prob=0.2, v_norm=None):
    """``(H0, V)`` with spectrum of H0 in ``[-4, 4]`` and ``||V||_2 <= 1``."""
    H0 = random_hermitian(n, rng, degenerate=rng.random() < degenerate_prob)
    if v_norm is None:
        v_norm = rng.uniform(0.2, 1.0)
    return H0, _perturbation(n, rng, v_norm)


def wide_spectrum_pair(n, rng, scale=1e4, v_norm=None):
    """Pair whose H0 spectrum spans ``[-scale, scale]``.

    The extreme eigenvalues sit at ``+-scale`` and the rest in ``[-5, 5]``, so
    the remainder still sees nearby eigenvalues of a far-reaching operator.
    """
    if n < 2:
        ev = np.array([scale])
    else:
        ev = np.concatenate([[-scale, scale], rng.uniform(-5.0, 5.0, size=n - 2)])
    H0 = random_hermitian(n, rng, eigenvalues=ev)
    if v_norm is None:
        v_norm = rng.uniform(0.2, 1.0)
    return H0, _perturbation(n, rng, v_norm)


def ensemble(count, dims=(2, 8), seed=0, wide_scale=None):
    """List of ``count`` pairs with dimensions cycling through ``dims``."""
    rng = np.random.default_rng(seed)
    lo, hi = dims
    out = []
    for c in range(count):
        n = lo + c % (hi - lo + 1)
        if wide_scale:
            out.append(wide_spectrum_pair(n, rng, wide_scale))
        else:
            out.append(random_pair(n, rng))
    return out
