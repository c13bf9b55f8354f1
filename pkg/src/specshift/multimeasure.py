"""The discrete multilinear spectral measure of a Hermitian pair.

For ``H0`` with distinct eigenvalues ``l_1..l_k`` and spectral projections
``P_1..P_k``, the order-``p`` measure puts the complex weight

    w(i_1, ..., i_p) = tr(P_{i_1} V P_{i_2} V ... P_{i_p} V)

on the point ``(l_{i_1}, ..., l_{i_p})``. Weights are stored densely as an
array of shape ``(k,) * p``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .divdiff import cumulative_kernel_pieces, divided_differences, resolvent_divided_differences
from .errors import CapacityError, DomainError, SymmetryViolationError
from .functions import TruncatedPower
from .operator_core import as_hermitian
from .piecewise import PiecewisePolynomial

__all__ = [
    "MultiSpectralMeasure",
    "build_measure",
    "integrate_divided_difference",
    "integrate_cumulative_kernel",
    "kernel_integral_to_piecewise",
    "resolvent_power_trace",
    "kernel_from_groups",
    "grouped_weights_extended",
]

DEFAULT_ATOM_BUDGET = 10 ** 7
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MultiSpectralMeasure:
    order: int
    eigenvalues: np.ndarray
    weights: np.ndarray

    def atoms(self):
        """Index tuples and weights of the nonzero atoms."""
        idx = np.argwhere(self.weights != 0)
        return idx, self.weights[tuple(idx.T)]

    def items(self):
        idx, w = self.atoms()
        return [(tuple(int(i) for i in row), complex(x)) for row, x in zip(idx, w)]

    def total(self):
        return complex(self.weights.sum())

    def total_variation(self):
        return float(np.abs(self.weights).sum())

    def reversal_residual(self):
        """``max |conj(w(i_1..i_p)) - w(i_p..i_1)|``."""
        rev = np.transpose(self.weights, tuple(range(self.order))[::-1])
        return float(np.max(np.abs(self.weights.conj() - rev)))

    def grouped(self):
        """Weights summed over permutations: sorted index tuples and sums."""
        idx, w = self.atoms()
        if idx.size == 0:
            return np.zeros((0, self.order), dtype=int), np.zeros(0, dtype=complex)
        srt = np.sort(idx, axis=1)
        keys, inv = np.unique(srt, axis=0, return_inverse=True)
        inv = inv.ravel()
        sums = (np.bincount(inv, weights=w.real, minlength=len(keys))
                + 1j * np.bincount(inv, weights=w.imag, minlength=len(keys)))
        return keys, sums


def build_measure(D, V, p, atom_budget=DEFAULT_ATOM_BUDGET, prune=True):
    """Materialise all atoms of the order-``p`` measure of ``(H0, V)``.

    Parameters
    ----------
    D : SpectralDecomposition
        Decomposition of ``H0``.
    V : HermitianOperator or array_like
    p : int
        Order (number of copies of ``V``).
    atom_budget : int
        Upper bound on ``p * k**p`` (``k`` distinct eigenvalues).
    prune : bool
        Zero out atoms below ``1e-15 * ||V||^p``.
    """
    V = as_hermitian(V).matrix
    if V.shape[0] != D.dim:
        raise DomainError(f"dimension mismatch: H0 is {D.dim}, V is {V.shape[0]}")
    if int(p) != p or p < 1:
        raise DomainError("order must be a positive integer")
    k = len(D.eigenvalues)
    atoms, work = p * k ** p, k ** max(p - 1, 1) * D.dim ** 2
    if atoms > atom_budget or work > 4 * atom_budget:
        need = (f"{atoms} atoms (budget {atom_budget})" if atoms > atom_budget
                else f"{work} intermediate entries (limit {4 * atom_budget})")
        raise CapacityError(
            f"order {p} over {k} distinct eigenvalues needs {need}; "
            "reduce the order or the dimension")
    U = D.eigenvectors
    Vt = U.conj().T @ V @ U
    mask = (D.labels[None, :] == np.arange(k)[:, None]).astype(float)
    B = mask[:, :, None] * Vt[None, :, :]                 # Q_c V~, shape (k, n, n)
    if p == 1:
        w = np.einsum("caa->c", B)
    else:
        A = B
        for _ in range(p - 2):
            A = np.einsum("...ab,cbd->...cad", A, B)
        w = np.einsum("...ab,cba->...c", A, B)
    if prune:
        vnorm = np.linalg.norm(V, 2)
        w = np.where(np.abs(w) < 1e-15 * vnorm ** p, 0.0, w)
    w = np.asarray(w, dtype=complex)
    w.setflags(write=False)
    return MultiSpectralMeasure(int(p), D.eigenvalues, w)


def _atom_nodes(m, pattern):
    idx, w = m.atoms()
    if pattern == "first_repeated":
        idx = np.concatenate([idx, idx[:, :1]], axis=1)
    elif pattern != "plain":
        raise DomainError(f"unknown node pattern {pattern!r}")
    return np.sort(m.eigenvalues[idx], axis=1), w


def integrate_divided_difference(m, f, node_pattern="plain"):
    """Integrate divided differences of ``f`` against the measure.

    ``plain`` integrates ``[l_1..l_p] f``; ``first_repeated`` integrates
    ``[l_1..l_p, l_1] f`` (one order higher, first node doubled).
    """
    x, w = _atom_nodes(m, node_pattern)
    if w.size == 0:
        return 0j
    return complex(np.sum(w * divided_differences(f, x)))


def resolvent_power_trace(m, z, z_derivative=0):
    """``(d/dz)^r`` of ``tr(((zI - H0)^{-1} V)^p)`` from the measure atoms."""
    x, w = _atom_nodes(m, "plain")
    if w.size == 0:
        return 0j
    return complex(np.sum(w * resolvent_divided_differences(z, 1, x, z_derivative)))


def _real_checked(value, scale, what):
    if abs(value.imag) > IMAG_TOL * max(scale, 1e-300):
        raise SymmetryViolationError(
            f"{what}: imaginary residue {abs(value.imag):.3e} exceeds "
            f"{IMAG_TOL:g} * {scale:.3e}")
    return float(value.real)


def integrate_cumulative_kernel(m, t):
    """``sum_atoms w * [l_1..l_p] (. - t)_+^(p-1)`` evaluated at ``t``.

    Uses the recursive divided-difference table on each atom.
    """
    x, w = _atom_nodes(m, "plain")
    if w.size == 0:
        return 0.0
    t = float(t)
    vals = np.zeros(len(w))
    vals[t < x[:, 0]] = 1.0
    mid = (t >= x[:, 0]) & (t < x[:, -1])
    if np.any(mid):
        dd = divided_differences(TruncatedPower(t, m.order - 1), x[mid], method="recursive")
        vals[mid] = dd.real
    return _real_checked(complex(np.sum(w * vals)), float(np.abs(w).sum()),
                         "cumulative kernel integral")


def kernel_integral_to_piecewise(m):
    """Exact piecewise form of :func:`integrate_cumulative_kernel` in ``t``.

    Breakpoints are the distinct eigenvalues; the left tail is the total
    weight ``tr(V^p)`` and the right tail is zero.
    """
    keys, sums = m.grouped()
    scale = m.total_variation()
    imag = complex(0.0, float(np.abs(sums.imag).sum()))
    _real_checked(imag, scale, "grouped measure weights")
    return kernel_from_groups(m.eigenvalues, keys, sums.real, m.order)


def kernel_from_groups(eigenvalues, keys, sums, order):
    """Weighted sum of cumulative kernels over sorted eigenvalue-index keys.

    ``sums`` may hold extended-precision objects, in which case the kernel
    pieces are built in that precision too.
    """
    grid = np.asarray(eigenvalues, dtype=float)
    K = len(grid) - 1
    extended = np.asarray(sums).dtype == object
    if extended:
        import mpmath

        nodes = np.array([mpmath.mpf(float(g)) for g in grid], dtype=object)
        coeffs = np.zeros((K, order), dtype=object)
        left = mpmath.mpf(0)
    else:
        nodes = grid
        coeffs = np.zeros((K, order))
        left = 0.0
    for key, s in zip(keys, sums):
        left = left + s
        if s == 0:
            continue
        coeffs += s * cumulative_kernel_pieces(nodes[key], grid)
    if not extended:
        left = float(left)
    return PiecewisePolynomial(grid, coeffs, left, 0.0)


def grouped_weights_extended(D, V, p, dps=50):
    """Permutation-summed weights of the order-``p`` measure in extended precision.

    Works with ``V`` in the eigenbasis of ``H0`` as exact data, expands each
    projection into rank-one pieces and sums the products
    ``V~[a1,a2] ... V~[ap,a1]`` by the multiset of eigenvalue labels. Returns
    sorted label keys and real ``mpmath`` sums.
    """
    import mpmath

    V = as_hermitian(V).matrix
    U = D.eigenvectors
    Vt = U.conj().T @ V @ U
    Vt = (Vt + Vt.conj().T) / 2
    n = Vt.shape[0]
    labels = D.labels
    budget = n ** p
    if budget > DEFAULT_ATOM_BUDGET // 10:
        raise CapacityError(f"extended-precision order {p} needs {budget} products")
    with mpmath.workdps(dps):
        Vm = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                Vm[i, j] = mpmath.mpc(Vt[i, j].real, Vt[i, j].imag)
        if p == 1:
            T = np.array([Vm[i, i] for i in range(n)], dtype=object)
        else:
            T = Vm
            for m in range(2, p):
                T = T[..., None] * Vm.reshape((1,) * (m - 1) + (n, n))
            T = T * Vm.T.reshape((n,) + (1,) * (p - 2) + (n,))
        acc = {}
        for idx in np.ndindex(T.shape):
            key = tuple(sorted(int(labels[a]) for a in idx))
            acc[key] = acc.get(key, 0) + T[idx]
        keys = sorted(acc)
        sums = np.array([mpmath.re(acc[k]) for k in keys], dtype=object)
    return np.array(keys, dtype=int).reshape(len(keys), p), sums
