"""Symbols, least pluriharmonic majorants and the full majorant family.

For Theta = sum A_w X_w with coefficients E -> Y, the symbol is the column
Gamma: E -> Y (x) F^2_m, Gamma x = sum_w A_w x (x) e_{reverse(w)}. The least
pluriharmonic majorant of Theta(rR)^* Theta(rR) is Re W(rR), where W has
coefficients Gamma^* Gamma at the empty word and 2 Gamma^* (I (x) S_{rev w}^*) Gamma
elsewhere.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .fock import EMPTY, FockBasis, Word, compress, reverse
from .freeseries import FreeSeries, OperatorTuple, eval_tuple, hinf_norm, radial_eval, word_products
from .linalg import Defect, adj, defect, fro, herm, min_eig, op_norm
from .report import Report
from .transforms import cayley, inverse_cayley, operator_poisson, vacuum_functional

DEFAULT_GRID = (0.0, 0.25, 0.5, 0.75, 0.9, 1.0)


class InconsistentMajorant(ValueError):
    """The given function is not of the form W + D (x) I Lambda D (x) I."""


@lru_cache(maxsize=16)
def left_word_products(basis: FockBasis) -> dict[Word, np.ndarray]:
    return word_products(basis.creation_tuple("left"), basis.m)


@dataclass(frozen=True, eq=False)
class Symbol:
    gamma: np.ndarray
    rows: int  # dim Y
    cols: int  # dim E
    basis: FockBasis

    def block(self) -> np.ndarray:
        """Gamma as an array indexed (y, fock, e)."""
        return self.gamma.reshape(self.rows, self.basis.dim, self.cols)

    def shifted(self, w: Word) -> np.ndarray:
        """(I (x) S_w^*) Gamma for the left creation word S_w."""
        S = left_word_products(self.basis)[w]
        return np.einsum("gf,yge->yfe", S, self.block()).reshape(self.gamma.shape)

    def coefficient(self, w: Word) -> np.ndarray:
        """Recover A_w = E_Y^* (I (x) P_C)(I (x) S_{rev w}^*) Gamma."""
        return self.shifted(reverse(w)).reshape(self.rows, self.basis.dim, self.cols)[:, 0, :]


def symbol(theta: FreeSeries, basis: FockBasis) -> Symbol:
    if theta.n != basis.n:
        raise ValueError("basis and series disagree on n")
    if theta.degree > basis.m:
        raise ValueError(f"series has degree {theta.degree} beyond the Fock truncation {basis.m}")
    G = np.zeros((theta.rows, basis.dim, theta.cols), dtype=complex)
    for w, A in theta.coeffs.items():
        G[:, basis.index[reverse(w)], :] = A
    return Symbol(G.reshape(theta.rows * basis.dim, theta.cols), theta.rows, theta.cols, basis)


def _cauchy_apply(sym: Symbol, X: OperatorTuple, B: np.ndarray) -> np.ndarray:
    """(I - sum_i I_Y (x) S_i^* (x) X_i)^{-1} B.

    S_i^* is nilpotent on the truncation, so the Neumann series stops after
    m + 1 terms and the result is the exact inverse.
    """
    basis = sym.basis
    S = basis.creation_tuple("left")
    N = sum(sp.kron(sp.eye(sym.rows), sp.kron(sp.csr_matrix(Si.T), sp.csr_matrix(Xi)))
            for Si, Xi in zip(S, X)).tocsr()
    term = B
    out = B.copy()
    for _ in range(basis.m):
        term = N @ term
        out += term
    return out


def state_space_eval(sym: Symbol, X: OperatorTuple) -> np.ndarray:
    """[E_Y^* (I (x) P_C) (x) I] (I - sum I (x) S_i^* (x) X_i)^{-1} (Gamma (x) I)."""
    X = [np.asarray(Xi, dtype=complex) for Xi in X]
    h = X[0].shape[0]
    Z = _cauchy_apply(sym, X, np.kron(sym.gamma, np.eye(h)))
    return Z.reshape(sym.rows, sym.basis.dim, h, sym.cols * h)[:, 0].reshape(sym.rows * h, sym.cols * h)


def least_majorant(theta: FreeSeries, basis: FockBasis) -> FreeSeries:
    sym = symbol(theta, basis)
    G = sym.gamma
    coeffs = {EMPTY: adj(G) @ G}
    for w in basis.words[1:]:
        coeffs[w] = 2.0 * adj(G) @ sym.shifted(reverse(w))
    return FreeSeries(basis.n, basis.m, theta.cols, theta.cols, coeffs)


def defect_residual(theta: FreeSeries, r: float, basis: FockBasis) -> float:
    """Frobenius residual of the defect identity

        Theta^* Theta = Re W - (1 - r^2) (Gamma^* (x) I) Phi^* (sum_j I (x) S_j S_j^* (x) I) Phi (Gamma (x) I)

    at X = rR, compressed to Fock degree m - deg(Theta) - 1 where every term is exact.
    """
    d = basis.m - theta.degree - 1
    if d < 0:
        raise ValueError(f"truncation {basis.m} leaves no exact block for degree {theta.degree}")
    sym = symbol(theta, basis)
    W = least_majorant(theta, basis)
    X = basis.creation_tuple("right", r)
    h, keep = basis.dim, basis.dim_upto(d)
    E, Y = theta.cols, theta.rows

    th = eval_tuple(theta, X, nilpotent=True)
    lhs = compress(adj(th) @ th, basis, d)
    reW = compress(herm(eval_tuple(W, X, nilpotent=True)), basis, d)

    # columns of I_E (x) I_H restricted to E (x) P^(d)
    J = np.kron(np.eye(E), np.eye(h)[:, :keep])
    Z = _cauchy_apply(sym, X, np.kron(sym.gamma, np.eye(h)) @ J)
    Zt = Z.reshape(Y, basis.dim, h, E * keep)
    # sum_j S_j S_j^* = I - P_C on the truncation: drop the vacuum slot
    tail = Zt[:, 1:].reshape(-1, E * keep)
    correction = adj(tail) @ tail
    return fro(lhs - (reW - (1.0 - r * r) * correction))


# curves and sub-pluriharmonicity

@dataclass(frozen=True)
class CurveSampler:
    """r -> self-adjoint operator on E (x) F^2_m, built from creation operators on ``side``."""

    fn: Callable[[float, FockBasis], np.ndarray]
    tag: str
    side: str = "right"

    def __call__(self, r: float, basis: FockBasis) -> np.ndarray:
        M = np.asarray(self.fn(r, basis), dtype=complex)
        scale = max(1.0, op_norm(M))
        if fro(M - adj(M)) > 1e-10 * scale:
            raise ValueError(f"curve {self.tag!r} is not self-adjoint at r={r}")
        return herm(M)


def theta_curve(theta: FreeSeries, side: str = "right", sign: float = 1.0) -> CurveSampler:
    """r -> sign * Theta(rC)^* Theta(rC), compressed exactly to E (x) P^(m)."""

    def fn(r: float, basis: FockBasis) -> np.ndarray:
        big = FockBasis(basis.n, basis.m + theta.degree)
        T = radial_eval(theta, r, big, side)
        return sign * compress(adj(T) @ T, big, basis.m)

    tag = ("-" if sign < 0 else "") + "Theta*Theta"
    return CurveSampler(fn, tag, side)


def real_part_curve(u: FreeSeries, side: str = "right") -> CurveSampler:
    return CurveSampler(lambda r, basis: herm(radial_eval(u, r, basis, side)), "Re u", side)


def is_subpluriharmonic(g: CurveSampler, r_grid: Sequence[float], gamma: float | None,
                        basis: FockBasis, tol: float = 1e-9) -> Report:
    """Check g(r) <= P_{(r/gamma)C}[g(gamma)] for r < gamma on the grid.

    With gamma=None every grid pair r < gamma is checked. The report also carries
    the vacuum monotonicity checks and the maximum principle diagnostic.
    """
    grid = sorted(set(float(r) for r in r_grid))
    if any(r < 0 or r > 1 for r in grid):
        raise ValueError("grid must lie in [0, 1]")
    gammas = grid if gamma is None else [float(gamma)]
    samples = {r: g(r, basis) for r in set(grid) | set(gammas) | {0.0}}
    rep = Report(f"sub-pluriharmonic[{g.tag}]")
    worst_gap = 0.0
    for gm in gammas:
        if gm == 0.0:
            continue
        for r in grid:
            if r >= gm:
                continue
            X = basis.creation_tuple(g.side, r / gm)
            diff = operator_poisson(samples[gm], X, basis, side=g.side) - samples[r]
            worst_gap = max(worst_gap, fro(diff))
            rep.eigen(f"poisson_domination r={r:g} gamma={gm:g}", min_eig(diff), tol)
    rep.values["max_equality_gap"] = worst_gap

    taus = {r: vacuum_functional(samples[r], basis) for r in grid}
    for r1, r2 in zip(grid, grid[1:]):
        rep.eigen(f"vacuum_monotone {r1:g}<={r2:g}", min_eig(taus[r2] - taus[r1]), tol)
    for r in grid:
        lift = np.kron(taus[r], np.eye(basis.dim))
        rep.eigen(f"origin_below_vacuum r={r:g}", min_eig(lift - samples[0.0]), tol)

    peak = all(min_eig(samples[0.0] - samples[r]) >= -tol for r in grid)
    spread = max(fro(samples[r] - samples[0.0]) for r in grid)
    rep.values["max_principle_triggered"] = float(peak)
    rep.flag("max_principle", (not peak) or spread <= 1e3 * tol,
             "maximum at the origin, constant expected" if peak else "")
    return rep


def majorant_existence(g: CurveSampler, r_grid: Sequence[float], basis: FockBasis,
                       tol: float = 1e-9) -> Report:
    """Bounded vacuum functional test plus the Poisson candidate from the largest grid radius."""
    grid = sorted(set(float(r) for r in r_grid))
    rep = Report(f"majorant-existence[{g.tag}]")
    samples = {r: g(r, basis) for r in grid}
    sup = max(op_norm(vacuum_functional(samples[r], basis)) for r in grid)
    rep.values["vacuum_sup"] = sup
    rep.flag("vacuum_bounded", bool(np.isfinite(sup)))
    top = grid[-1]
    worst = np.inf
    for r in grid:
        if r < top:
            cand = operator_poisson(samples[top], basis.creation_tuple(g.side, r / top), basis, side=g.side)
            worst = min(worst, min_eig(cand - samples[r]))
    if np.isfinite(worst):
        rep.eigen("candidate_dominates", worst, tol)
    rep.values["candidate_radius"] = top
    return rep


# the majorant family

@dataclass(frozen=True, eq=False)
class MajorantSetup:
    theta: FreeSeries
    basis: FockBasis
    sym: Symbol
    W: FreeSeries
    D: Defect

    @property
    def k(self) -> int:
        return self.D.rank

    def dressing(self) -> tuple[np.ndarray, np.ndarray]:
        """(D_Gamma U, U^* D_Gamma) with U an orthonormal basis of range(D_Gamma)."""
        left = self.D.basis * self.D.values
        return left, adj(left)


def majorant_setup(theta: FreeSeries, basis: FockBasis) -> MajorantSetup:
    sym = symbol(theta, basis)
    return MajorantSetup(theta, basis, sym, least_majorant(theta, basis), defect(sym.gamma))


def majorant_from_param(theta: FreeSeries, G: FreeSeries, basis: FockBasis,
                        tol: float = 1e-9) -> FreeSeries:
    """F = W + (D (x) I)(I + G)(I - G)^{-1}(D (x) I) with D = (I - Gamma^* Gamma)^{1/2}."""
    s = majorant_setup(theta, basis)
    if G.shape != (s.k, s.k):
        raise ValueError(f"parameter must act on the {s.k}-dimensional defect space, got {G.shape}")
    if s.k == 0:
        return s.W.with_cap(max(s.W.max_degree, G.max_degree))
    if op_norm(G.coeff(EMPTY)) > tol:
        raise ValueError("parameter must vanish at the origin")
    if hinf_norm(G, basis) > 1.0 + tol:
        raise ValueError("parameter is outside the unit ball")
    left, right = s.dressing()
    return s.W + inverse_cayley(G).lmul(left).rmul(right)


def param_from_majorant(theta: FreeSeries, F: FreeSeries, basis: FockBasis,
                        tol: float = 1e-8) -> FreeSeries:
    """Invert majorant_from_param: factor F - W through the defect range, then Cayley."""
    s = majorant_setup(theta, basis)
    if F.shape != (theta.cols, theta.cols):
        raise ValueError("majorant has the wrong coefficient shape")
    if op_norm(F.coeff(EMPTY) - np.eye(theta.cols)) > tol:
        raise InconsistentMajorant("majorant must equal the identity at the origin")
    X = basis.creation_tuple("right")
    th = eval_tuple(theta, X, nilpotent=True)
    gap = min_eig(herm(eval_tuple(F, X, nilpotent=True)) - adj(th) @ th)
    if gap < -tol:
        raise InconsistentMajorant(f"Re F does not dominate Theta^* Theta (min eigenvalue {gap:.3e})")
    psi = F - s.W
    if s.k == 0:
        if max((op_norm(A) for A in psi.coeffs.values()), default=0.0) > tol:
            raise InconsistentMajorant("Gamma is isometric, so the only majorant is W")
        return FreeSeries.zero(theta.n, F.max_degree, 0, 0)
    U, sv = s.D.basis, s.D.values
    left, right = s.dressing()
    lam = {}
    for w, Q in psi.coeffs.items():
        K = (adj(U) @ Q @ U) / np.outer(sv, sv)
        if op_norm(Q - left @ K @ right) > tol * max(1.0, op_norm(Q)):
            raise InconsistentMajorant(f"coefficient at {w} is not supported on the defect range")
        lam[w] = K
    Lam = FreeSeries(theta.n, F.max_degree, s.k, s.k, lam)
    return cayley(Lam)
