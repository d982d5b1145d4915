"""Noncommutative Poisson transforms, the Cayley transform pair and Herglotz moments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import EMPTY, FockBasis, Word, compress
from .freeseries import (FreeSeries, OperatorTuple, TruncationError, inverse, multiply,
                         nilpotency_order, row_norm, word_products)
from .linalg import adj, min_eig, psd_sqrt

CAYLEY_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class PoissonKernel:
    """K h = sum_{|w| <= m} e_w (x) Delta X_w^* h, a map H -> F^2_m (x) H.

    ``exact`` records whether X is nilpotent of order <= m + 1, in which case
    K is an isometry and every transform below is exact.
    """

    basis: FockBasis
    K: np.ndarray
    delta: np.ndarray
    exact: bool

    @property
    def hdim(self) -> int:
        return self.delta.shape[0]

    def _tensor(self) -> np.ndarray:
        return self.K.reshape(self.basis.dim, self.hdim, self.hdim)

    def transform(self, f: np.ndarray) -> np.ndarray:
        """K^* (f (x) I) K for f acting on F^2_m."""
        return self._sandwich(np.asarray(f, dtype=complex), 1)

    def operator_transform(self, u: np.ndarray, side: str = "left") -> np.ndarray:
        """(I (x) K^*)(u (x) I)(I (x) K) for u acting on E (x) F^2_m.

        With side="right" the transform is the one adapted to curves built from
        right creation operators: u is first conjugated by the word-reversal flip.
        """
        d = self.basis.dim
        if u.shape[0] != u.shape[1] or u.shape[0] % d:
            raise ValueError(f"operator of shape {u.shape} does not act on E (x) F^2_m")
        e = u.shape[0] // d
        if side == "right":
            U = np.kron(np.eye(e), self.basis.flip)
            u = U @ u @ U
        elif side != "left":
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        return self._sandwich(u, e)

    def _sandwich(self, u: np.ndarray, e: int) -> np.ndarray:
        # (I_E (x) K)^* (u (x) I_H) (I_E (x) K) as two matrix products
        d, h = self.basis.dim, self.hdim
        Kt = self._tensor()
        Y = u.reshape(e * d * e, d) @ Kt.reshape(d, h * h)             # (e f i, h b)
        Y = Y.reshape(e, d, e, h, h).transpose(0, 2, 4, 1, 3)             # (e i b, f h)
        Z = Y.reshape(e * e * h, d * h) @ Kt.conj().reshape(d * h, h)   # (e i b, a)
        return Z.reshape(e, e, h, h).transpose(0, 3, 1, 2).reshape(e * h, e * h)


def poisson_kernel(X: OperatorTuple, basis: FockBasis) -> PoissonKernel:
    X = [np.asarray(Xi, dtype=complex) for Xi in X]
    if len(X) != basis.n:
        raise ValueError(f"expected {basis.n} operators, got {len(X)}")
    order = nilpotency_order(X)
    if order is None and row_norm(X) >= 1.0:
        raise TruncationError("Poisson kernel needs row norm < 1 or a nilpotent tuple")
    h = X[0].shape[0]
    gap = np.eye(h) - sum(Xi @ adj(Xi) for Xi in X)
    if min_eig(gap) < -1e-10:
        raise ValueError("tuple is not a row contraction")
    delta = psd_sqrt(gap)
    prods = word_products(X, basis.m)
    K = np.zeros((basis.dim * h, h), dtype=complex)
    for j, w in enumerate(basis.words):
        K[j * h:(j + 1) * h] = delta @ adj(prods[w])
    return PoissonKernel(basis, K, delta, exact=order is not None and order <= basis.m + 1)


def poisson_transform(f: np.ndarray, X: OperatorTuple, basis: FockBasis) -> np.ndarray:
    return poisson_kernel(X, basis).transform(f)


def operator_poisson(u: np.ndarray, X: OperatorTuple, basis: FockBasis, side: str = "left") -> np.ndarray:
    return poisson_kernel(X, basis).operator_transform(u, side)


def vacuum_functional(u: np.ndarray, basis: FockBasis) -> np.ndarray:
    return compress(u, basis, 0)


# Cayley transform

def _require_constant(f: FreeSeries, target: np.ndarray, what: str) -> FreeSeries:
    if f.rows != f.cols:
        raise ValueError("Cayley transform needs square coefficients")
    if np.max(np.abs(f.coeff(EMPTY) - target), initial=0.0) > CAYLEY_ATOL:
        raise ValueError(f"constant coefficient must be {what}")
    coeffs = dict(f.coeffs)
    coeffs[EMPTY] = target
    return FreeSeries(f.n, f.max_degree, f.rows, f.cols, coeffs)


def cayley(f: FreeSeries) -> FreeSeries:
    """(f - I)(f + I)^{-1} for f with f(0) = I."""
    f = _require_constant(f, np.eye(f.rows, dtype=complex), "the identity")
    I = FreeSeries.identity(f.n, f.max_degree, f.rows)
    g = multiply(f - I, inverse(f + I))
    return _require_constant(g, np.zeros((f.rows, f.rows), dtype=complex), "zero")


def inverse_cayley(g: FreeSeries) -> FreeSeries:
    """(I + g)(I - g)^{-1} for g with g(0) = 0."""
    g = _require_constant(g, np.zeros((g.rows, g.rows), dtype=complex), "zero")
    I = FreeSeries.identity(g.n, g.max_degree, g.rows)
    return multiply(I + g, inverse(I - g))


# Herglotz moments

@dataclass(frozen=True, eq=False)
class HerglotzMoments:
    """values[w] = sum_v A_v^* A_{vw}; values[()] is the Gram sum."""

    n: int
    m: int
    dim: int
    values: dict[Word, np.ndarray]

    def as_series(self) -> FreeSeries:
        return FreeSeries(self.n, self.m, self.dim, self.dim, self.values)


def herglotz_moments(theta: FreeSeries, basis: FockBasis) -> HerglotzMoments:
    if theta.n != basis.n:
        raise ValueError("basis and series disagree on n")
    vals: dict[Word, np.ndarray] = {}
    for w, A in theta.coeffs.items():
        if len(w) > basis.m:
            continue
        for k in range(len(w) + 1):
            head, tail = w[:k], w[k:]
            B = theta.coeffs.get(head)
            if B is None:
                continue
            term = adj(B) @ A
            vals[tail] = vals[tail] + term if tail in vals else term
    return HerglotzMoments(basis.n, basis.m, theta.cols, vals)


def herglotz_series(mu: HerglotzMoments) -> FreeSeries:
    coeffs = {w: (V if w == EMPTY else 2.0 * V) for w, V in mu.values.items()}
    return FreeSeries(mu.n, mu.m, mu.dim, mu.dim, coeffs)
