"""A Hermitian pair ``(H0, V)`` with cached decompositions and measures."""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .multimeasure import DEFAULT_ATOM_BUDGET, build_measure, grouped_weights_extended
from .operator_core import HermitianOperator, as_hermitian, spectral_decompose

__all__ = ["Perturbation", "as_pair", "choose_precision", "EXTENDED_DPS", "PRECISIONS"]

# decimal digits for the extended-precision route
EXTENDED_DPS = 50


class Perturbation:
    """Initial operator ``H0`` and perturbation ``V``.

    Decompositions of ``H0`` and ``H0 + V`` are computed once; measures and
    spectral shift densities are memoised per order. The memo tables are the
    only mutable state and only ever grow with values that are themselves
    immutable.
    """

    def __init__(self, H0, V, cluster_tol=None, atom_budget=DEFAULT_ATOM_BUDGET):
        self.H0 = as_hermitian(H0)
        self.V = as_hermitian(V)
        if self.H0.dim != self.V.dim:
            raise DomainError(f"dimension mismatch: {self.H0.dim} vs {self.V.dim}")
        self.H1 = HermitianOperator(self.H0.matrix + self.V.matrix)
        self.cluster_tol = cluster_tol
        self.atom_budget = atom_budget
        self.D0 = spectral_decompose(self.H0, cluster_tol)
        self.D1 = spectral_decompose(self.H1, cluster_tol)
        self._measures = {}
        self._etas = []
        self._xi_offsets = None
        self._ext = {}

    @property
    def dim(self):
        return self.H0.dim

    def measure(self, p):
        if p not in self._measures:
            self._measures[p] = build_measure(self.D0, self.V, p, self.atom_budget)
        return self._measures[p]

    def trace_power(self, p):
        """``tr(V^p)`` (real)."""
        return float(np.trace(np.linalg.matrix_power(self.V.matrix, p)).real)

    def abs_trace_power(self, p):
        """``tr(|V|^p)``, the natural size scale at order ``p``."""
        s = np.linalg.eigvalsh(self.V.matrix)
        return float(np.sum(np.abs(s) ** p))

    def xi_offsets(self):
        """Sub-ulp corrections to the eigenvalues of ``H0 + V``.

        All downstream densities see ``H0`` through its clustered eigenvalues
        and ``V`` through its matrix in the eigenbasis of ``H0``. The
        eigenvalues of that model operator are recomputed as long-double
        Rayleigh quotients; the returned array holds ``refined - stored`` for
        each distinct eigenvalue of ``H0 + V``. Without this correction the
        rounding of the breakpoints of the Krein function is amplified by
        roughly ``L^(p-1)/(p-1)!`` on a spectrum of width ``L``.
        """
        if self._xi_offsets is None:
            U = self.D0.eigenvectors
            Vt = U.conj().T @ self.V.matrix @ U
            Vt = (Vt + Vt.conj().T) / 2
            ext = np.clongdouble
            M = Vt.astype(ext) + np.diag(self.D0.nodes.astype(np.longdouble)).astype(ext)
            W = (U.conj().T @ self.D1.eigenvectors).astype(ext)
            num = np.einsum("ik,ij,jk->k", W.conj(), M, W).real
            den = np.einsum("ik,ik->k", W.conj(), W).real
            rq = num / den
            labels = self.D1.labels
            k = len(self.D1.eigenvalues)
            sums = np.zeros(k, dtype=np.longdouble)
            np.add.at(sums, labels, rq)
            means = sums / self.D1.multiplicities
            off = (means - self.D1.eigenvalues.astype(np.longdouble)).astype(float)
            # a correction larger than the clustering scale means the refinement failed
            bound = 1e-6 * (np.ptp(self.D1.eigenvalues) + 1.0)
            self._xi_offsets = np.where(np.abs(off) < bound, off, 0.0)
        return self._xi_offsets

    def _model_vt(self):
        U = self.D0.eigenvectors
        Vt = U.conj().T @ self.V.matrix @ U
        return (Vt + Vt.conj().T) / 2

    def spectral_width(self):
        e = np.concatenate([self.D0.eigenvalues, self.D1.eigenvalues])
        return float(e.max() - e.min())

    def model_eigensystem_extended(self):
        """Eigenvalues (ascending) and eigenvectors of the model ``H0 + V``.

        The model is ``diag(eigenvalues of H0) + U* V U`` in the eigenbasis
        ``U`` of ``H0``, the same data every density is built from. Values
        are ``mpmath`` objects at ``EXTENDED_DPS`` digits; the eigenvectors
        are columns of an ``mpmath`` matrix in the eigenbasis of ``H0``.
        """
        if "model" not in self._ext:
            import mpmath

            Vt = self._model_vt()
            n = self.dim
            with mpmath.workdps(EXTENDED_DPS):
                M = mpmath.matrix(n, n)
                for i in range(n):
                    for j in range(n):
                        M[i, j] = mpmath.mpc(Vt[i, j].real, Vt[i, j].imag)
                    M[i, i] += mpmath.mpf(float(self.D0.nodes[i]))
                E, Q = mpmath.eighe(M)
                order = sorted(range(n), key=lambda k: E[k])
                E = [E[k] for k in order]
                Qs = mpmath.matrix(n, n)
                for c, k in enumerate(order):
                    for i in range(n):
                        Qs[i, c] = Q[i, k]
            self._ext["model"] = (E, Qs)
        return self._ext["model"]

    def model_eigenvalues_extended(self):
        """Sorted eigenvalues of the model ``H0 + V`` at ``EXTENDED_DPS`` digits."""
        return self.model_eigensystem_extended()[0]

    def xi_offsets_extended(self):
        """Breakpoints and offsets for the extended route.

        Returns the eigenvalues of the model ``H0 + V`` rounded to double and
        the remainders (mpmath objects, exact to ``EXTENDED_DPS`` digits).
        """
        if "offsets" not in self._ext:
            import mpmath

            E = self.model_eigenvalues_extended()
            with mpmath.workdps(EXTENDED_DPS):
                k = len(self.D1.eigenvalues)
                sums = [mpmath.mpf(0)] * k
                for e, lab in zip(E, self.D1.labels):
                    sums[lab] += e
                exact = [sums[c] / int(self.D1.multiplicities[c]) for c in range(k)]
                # breakpoints at the correctly rounded values keep |offset| <= ulp/2
                rounded = np.array([float(e) for e in exact])
                if np.any(np.diff(rounded) <= 0):
                    rounded = self.D1.eigenvalues.copy()
                off = np.array([e - mpmath.mpf(float(r)) for e, r in zip(exact, rounded)],
                               dtype=object)
            self._ext["offsets"] = (rounded, off)
        return self._ext["offsets"]

    def measure_extended(self, p):
        """Label keys and extended-precision permutation sums of the order-``p`` measure."""
        key = ("measure", p)
        if key not in self._ext:
            self._ext[key] = grouped_weights_extended(self.D0, self.V, p, EXTENDED_DPS)
        return self._ext[key]

    def __repr__(self):
        return f"Perturbation(dim={self.dim})"


def as_pair(H0, V=None):
    if isinstance(H0, Perturbation):
        if V is not None:
            raise DomainError("pass either a Perturbation or (H0, V), not both")
        return H0
    if V is None:
        raise DomainError("perturbation V is required")
    return Perturbation(H0, V)


PRECISIONS = ("auto", "double", "extended")

# the recursion loses about (1 + width)^(p-1) ulps on a spectrum of this width
_AUTO_THRESHOLD = 1e-10


def choose_precision(pair, p):
    """``"extended"`` when double rounding would be amplified past ``1e-10``."""
    growth = (1.0 + pair.spectral_width()) ** max(p - 1, 0)
    return "extended" if np.finfo(float).eps * growth > _AUTO_THRESHOLD else "double"
