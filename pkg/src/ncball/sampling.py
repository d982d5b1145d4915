"""Seeded random instances for tests, the self-test and the experiment scripts."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .fock import EMPTY, FockBasis
from .freeseries import FreeSeries, h2_norm, hinf_norm, vstack
from .lifting import LiftingData, validate_data
from .linalg import adj, min_eig


def cgauss(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(dim, random_state=rng)


def random_series(rng: np.random.Generator, n: int, m: int, rows: int, cols: int,
                  degree: int | None = None, zero_constant: bool = False) -> FreeSeries:
    degree = m if degree is None else degree
    words = FockBasis(n, degree).words
    terms = {w: cgauss(rng, rows, cols) for w in words if not (zero_constant and w == EMPTY)}
    return FreeSeries(n, m, rows, cols, terms)


def random_theta(rng: np.random.Generator, n: int, m: int, rows: int, cols: int,
                 degree: int = 2, h2: float | None = None) -> FreeSeries:
    """Polynomial with h2 norm ``h2`` (uniform in [0.3, 0.95] if not given)."""
    f = random_series(rng, n, m, rows, cols, degree)
    target = rng.uniform(0.3, 0.95) if h2 is None else h2
    return f.scale(target / h2_norm(f))


def random_schur(rng: np.random.Generator, basis: FockBasis, rows: int, cols: int,
                 level: float = 0.95, zero_constant: bool = False, degree: int | None = None) -> FreeSeries:
    """Random series rescaled so its nilpotent norm estimate equals ``level``."""
    if rows == 0 or cols == 0:
        return FreeSeries.zero(basis.n, basis.m, rows, cols)
    f = random_series(rng, basis.n, basis.m, rows, cols, degree, zero_constant)
    return f.scale(level / hinf_norm(f, basis))


def random_schur_params(rng: np.random.Generator, basis: FockBasis, k: int,
                        level: float = 0.95) -> list[FreeSeries]:
    """n parameter series on a k-dimensional space whose stacked column has norm estimate ``level``."""
    if k == 0:
        return [FreeSeries.zero(basis.n, basis.m, 0, 0) for _ in range(basis.n)]
    parts = [random_series(rng, basis.n, basis.m, k, k, basis.m - 1) for _ in range(basis.n)]
    scale = level / hinf_norm(vstack(parts), basis)
    return [p.scale(scale) for p in parts]


def random_row_contraction(rng: np.random.Generator, n: int, dim: int, norm: float) -> list[np.ndarray]:
    row = cgauss(rng, dim, n * dim)
    row *= norm / np.linalg.norm(row, 2)
    return [row[:, i * dim:(i + 1) * dim] for i in range(n)]


def random_gncl_data(rng: np.random.Generator, n: int = 2, hdim: int = 1, xdim: int = 3,
                     max_tries: int = 200) -> LiftingData:
    """Valid lifting data with one-dimensional G_i.

    Q_i is mostly supported on ker A plus a small generic part, and C_i is the
    least-norm solution of T_i A C_i = A Q_i. The kernel part of Q makes the
    block inequality hold; draws that still violate it are rejected. The
    kernel must have dimension at least n, otherwise the inequality almost
    never holds (the least-norm C_i are at least as long as the generic part).
    """
    if xdim - hdim < n:
        raise ValueError("need dim X - dim H >= n so that ker A can carry the Q_i")
    for _ in range(max_tries):
        T = random_row_contraction(rng, n, hdim, rng.uniform(0.5, 0.9))
        A = cgauss(rng, hdim, xdim)
        A *= rng.uniform(0.4, 0.9) / np.linalg.norm(A, 2)
        _, _, Vh = np.linalg.svd(A)
        ker = adj(Vh[hdim:])
        C, Q = [], []
        for Ti in T:
            q = 0.3 * cgauss(rng, xdim, 1) + ker @ cgauss(rng, xdim - hdim, 1)
            TA = Ti @ A
            c = np.linalg.pinv(TA) @ (A @ q)
            C.append(c)
            Q.append(q)
        scale = rng.uniform(0.3, 1.0) / max(np.linalg.norm(np.hstack(Q), 2), 1e-12)
        data = LiftingData(A, tuple(T), tuple(c * scale for c in C), tuple(q * scale for q in Q))
        Qrow = np.hstack(data.Q)
        gap = min_eig(adj(Qrow) @ Qrow - np.diag([float(np.vdot(c, c).real) for c in data.C]))
        if gap > 1e-6 and validate_data(data).passed:
            return data
    raise RuntimeError("could not draw valid lifting data")


def unitary_ncl_data(rng: np.random.Generator, dim: int = 2) -> LiftingData:
    """n = 1 data with A unitary: T = A Y A^*, C = I, Q = Y unitary."""
    A = random_unitary(rng, dim)
    Y = random_unitary(rng, dim)
    T = A @ Y @ adj(A)
    return LiftingData(A, (T,), (np.eye(dim),), (Y,))


def random_weighted_instance(rng: np.random.Generator, hdim: int = 3, xdim: int = 3,
                             rank_deficient: bool = False):
    """n = 1 instance (A, P, Y, T) with T A = A Y, A^* A <= P and Y^* P Y >= P.

    A unitary eigen-block W is shared by T and Y; T has an extra strict
    contraction block and Y an expanding block on which P is either the
    identity or zero. Random similarities hide the block structure.
    """
    k = 1 if min(hdim, xdim) < 3 else 2
    theta = np.exp(2j * np.pi * rng.random(k))
    W = np.diag(theta)
    a0 = np.diag(rng.uniform(0.3, 0.9, k) * np.exp(2j * np.pi * rng.random(k)))
    p0 = np.diag(np.abs(np.diag(a0)) ** 2 + rng.uniform(0.0, 0.5, k))
    h1, x1 = hdim - k, xdim - k
    T1 = cgauss(rng, h1, h1)
    T1 *= rng.uniform(0.2, 0.8) / max(np.linalg.norm(T1, 2), 1e-12) if h1 else 1.0
    T = np.zeros((hdim, hdim), dtype=complex)
    T[:k, :k], T[k:, k:] = W, T1
    Y = np.zeros((xdim, xdim), dtype=complex)
    Y[:k, :k] = W
    if x1:
        Y[k:, k:] = rng.uniform(1.0, 1.5) * random_unitary(rng, x1)
    A = np.zeros((hdim, xdim), dtype=complex)
    A[:k, :k] = a0
    P = np.zeros((xdim, xdim), dtype=complex)
    P[:k, :k] = p0
    if x1 and not rank_deficient:
        P[k:, k:] = np.eye(x1)
    Uh = random_unitary(rng, hdim)
    Z = cgauss(rng, xdim, xdim) + 2.0 * np.eye(xdim)
    Zi = np.linalg.inv(Z)
    T = Uh @ T @ adj(Uh)
    A = Uh @ A @ Zi
    Y = Z @ Y @ Zi
    P = adj(Zi) @ P @ Zi
    return A, 0.5 * (P + adj(P)), (Y,), (T,)
