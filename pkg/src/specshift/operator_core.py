"""Finite-dimensional Hermitian operators and their functional calculus."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EigensolverError, PoleCollisionError
from .functions import FunctionSpec

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "as_hermitian",
    "spectral_decompose",
    "default_cluster_tol",
    "apply_function",
    "resolvent",
    "trace",
    "counting_function",
    "schatten_norm",
    "schatten_sum_norm",
]

POLE_TOL = 1e-12


class HermitianOperator:
    """A validated Hermitian matrix.

    Parameters
    ----------
    entries : array_like, shape (n, n)
        Real or complex square matrix. It must equal its conjugate
        transpose to within ``1e-12 * max|entry|``.
    """

    __slots__ = ("_m",)

    def __init__(self, entries):
        m = np.array(entries, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DomainError(f"expected a nonempty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix has non-finite entries")
        scale = np.max(np.abs(m)) if m.size else 0.0
        resid = np.max(np.abs(m - m.conj().T))
        if resid > 1e-12 * scale:
            raise DomainError(f"matrix is not Hermitian (max |H - H^*| = {resid:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self):
        return self._m

    @property
    def dim(self):
        return self._m.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self._m if dtype is None else self._m.astype(dtype)

    def __add__(self, other):
        return HermitianOperator(self._m + as_hermitian(other).matrix)

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


def as_hermitian(x):
    return x if isinstance(x, HermitianOperator) else HermitianOperator(x)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Distinct eigenvalues with their spectral projections.

    Degenerate eigenvalues carry one projection of rank equal to the
    multiplicity. ``eigenvectors`` and ``labels`` expose the orthonormal
    eigenbasis and the cluster index of each basis vector.
    """

    eigenvalues: np.ndarray
    projections: np.ndarray
    multiplicities: np.ndarray
    eigenvectors: np.ndarray
    labels: np.ndarray

    @property
    def dim(self):
        return self.eigenvectors.shape[0]

    @property
    def nodes(self):
        """Clustered eigenvalue attached to each eigenvector."""
        return self.eigenvalues[self.labels]

    def residuals(self, H=None):
        """Invariant residuals (completeness, orthogonality, reconstruction)."""
        n = self.dim
        P = self.projections
        out = {
            "completeness": float(np.linalg.norm(P.sum(axis=0) - np.eye(n))),
            "multiplicity": int(n - self.multiplicities.sum()),
        }
        k = len(self.eigenvalues)
        ortho = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                ortho = max(ortho, float(np.linalg.norm(P[i] @ P[j])))
        out["orthogonality"] = ortho
        if H is not None:
            H = as_hermitian(H).matrix
            rec = np.einsum("i,iab->ab", self.eigenvalues, P)
            out["reconstruction"] = float(np.linalg.norm(H - rec))
        return out


def default_cluster_tol(eigenvalues):
    ev = np.asarray(eigenvalues, dtype=float)
    diam = float(ev.max() - ev.min()) if ev.size else 0.0
    return 1e-9 * (diam + 1.0)


def _cluster(values, tol):
    # values sorted ascending; single-linkage on consecutive gaps
    labels = np.zeros(len(values), dtype=int)
    if len(values) > 1:
        labels[1:] = np.cumsum(np.diff(values) > tol)
    return labels


def spectral_decompose(H, cluster_tol=None):
    """Eigendecomposition of a Hermitian matrix with eigenvalue clustering.

    Eigenvalues within ``cluster_tol`` of a neighbour are merged into one
    eigenvalue (their mean) whose projection is the sum of the individual
    eigenprojections. The default tolerance is
    ``1e-9 * (spectral diameter + 1)``.
    """
    H = as_hermitian(H)
    if cluster_tol is not None and cluster_tol < 0:
        raise DomainError("cluster_tol must be nonnegative")
    try:
        w, U = np.linalg.eigh(H.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(H.dim, None, str(exc)) from exc
    tol = default_cluster_tol(w) if cluster_tol is None else float(cluster_tol)
    labels = _cluster(w, tol)
    k = labels[-1] + 1
    mult = np.bincount(labels, minlength=k)
    eig = np.bincount(labels, weights=w, minlength=k) / mult
    proj = np.zeros((k, H.dim, H.dim), dtype=complex)
    for c in range(k):
        Uc = U[:, labels == c]
        proj[c] = Uc @ Uc.conj().T
    for a in (eig, proj, mult, U, labels):
        a.setflags(write=False)
    return SpectralDecomposition(eig, proj, mult, U, labels)


def _check_poles(f, eigenvalues):
    for pole in getattr(f, "poles", ()):
        d = np.min(np.abs(pole - np.asarray(eigenvalues)))
        if d <= POLE_TOL:
            raise PoleCollisionError(f"pole {pole} lies within {d:.1e} of an eigenvalue")


def apply_function(D, f):
    """Return ``f(H) = sum_i f(lambda_i) P_i``.

    ``f`` is a :class:`FunctionSpec` or any vectorised callable.
    """
    _check_poles(f, D.eigenvalues)
    vals = np.asarray(f(D.eigenvalues), dtype=complex)
    return np.einsum("i,iab->ab", vals, D.projections)


def resolvent(D, z, k=1):
    """Return ``(zI - H)^(-k)``."""
    z = complex(z)
    if z.imag == 0.0:
        raise DomainError("resolvent needs a nonreal spectral parameter")
    if int(k) != k or k < 1:
        raise DomainError("resolvent power must be a positive integer")
    vals = (z - D.eigenvalues) ** (-int(k))
    return np.einsum("i,iab->ab", vals, D.projections)


def trace(M):
    return complex(np.trace(np.asarray(M)))


def counting_function(D, t):
    """Number of eigenvalues (with multiplicity) strictly below ``t``."""
    return int(D.multiplicities[D.eigenvalues < t].sum())


def schatten_norm(M, p):
    """Schatten ``p``-norm; ``p = inf`` gives the operator norm."""
    if p < 1:
        raise DomainError(f"Schatten index must be >= 1, got {p}")
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if np.isinf(p):
        return float(s.max()) if s.size else 0.0
    return float(np.sum(s ** p) ** (1.0 / p))


def schatten_sum_norm(M, p):
    """The norm ``||M||_p + ||M||`` used on Schatten classes."""
    return schatten_norm(M, p) + schatten_norm(M, np.inf)
