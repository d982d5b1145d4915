"""Small dense linear algebra helpers shared by the operator modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_RTOL = 1e-10
# Eigenvalue cutoff for I - T*T. The square root of a rounding-level eigenvalue
# is ~1e-8, so deciding rank on D_T itself would keep spurious directions.
DEFECT_TOL = 1e-10


def adj(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def herm(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + adj(M))


def min_eig(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(herm(M))[0])


def op_norm(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def fro(M: np.ndarray) -> float:
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M))


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(herm(M))
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ adj(V)


def range_basis(M: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the column space, rank cut at rtol * sigma_max."""
    rows = M.shape[0]
    if M.size == 0:
        return np.zeros((rows, 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((rows, 0), dtype=complex)
    k = int(np.sum(s > rtol * s[0]))
    return U[:, :k].astype(complex)


def complement_basis(B: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(B) in C^dim."""
    if B.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    # eigenvalues of a projector are 0 or 1, so the cut is absolute
    w, U = np.linalg.eigh(np.eye(dim) - B @ adj(B))
    return U[:, w > 0.5].astype(complex)


@dataclass(frozen=True)
class Defect:
    """Defect operator D = (I - T*T)^{1/2} with an orthonormal basis of its range.

    ``coords`` is D written as a map into range coordinates, so that
    ``basis @ coords == op``.
    """

    op: np.ndarray
    basis: np.ndarray
    values: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def coords(self) -> np.ndarray:
        return self.values[:, None] * adj(self.basis)


def defect(T: np.ndarray, tol: float = DEFECT_TOL) -> Defect:
    dim = T.shape[1]
    w, V = np.linalg.eigh(herm(np.eye(dim) - adj(T) @ T))
    w = np.clip(w, 0.0, None)
    op = (V * np.sqrt(w)) @ adj(V)
    keep = w > tol
    return Defect(op=op.astype(complex), basis=V[:, keep].astype(complex), values=np.sqrt(w[keep]))
