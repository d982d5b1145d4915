"""Generalized noncommutative commutant lifting on truncated dilation spaces.

Data: a contraction A: X -> H, a row contraction T on H, and maps C_i, Q_i: G_i -> X
with T_i A C_i = A Q_i and [delta_ij C_i^* C_j] <= [Q_i^* Q_j]. A solution is a
contraction B: X -> K = H (+) D (x) F^2_m with P_H B = A and V_i B C_i = B Q_i,
where V is the minimal isometric dilation of T. Every solution has the form
B = [A; Gamma D_A] with Gamma the symbol of a function produced by a Schur-class
column whose restriction to the subspace F is the fixed contraction Omega.

Subspaces (D, D_A, F, G, ...) are carried as orthonormal bases; maps between
them are small dense matrices in those coordinates.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .fock import EMPTY, FockBasis
from .freeseries import FreeSeries, hinf_norm, matrix_from_dict, matrix_to_dict, row_norm
from .linalg import Defect, adj, complement_basis, defect, fro, min_eig, op_norm, range_basis
from .majorant import Symbol, majorant_setup, symbol
from .report import Report
from .schur import SchurColumn, j_forward, reconstruct_theta

DATA_TOL = 1e-10


class InvalidData(ValueError):
    def __init__(self, report: Report):
        names = ", ".join(c.name for c in report.failures())
        super().__init__(f"lifting data fails: {names}")
        self.report = report


@dataclass(frozen=True, eq=False)
class LiftingData:
    A: np.ndarray
    T: tuple[np.ndarray, ...]
    C: tuple[np.ndarray, ...]
    Q: tuple[np.ndarray, ...]

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        T = tuple(np.asarray(t, dtype=complex) for t in self.T)
        C = tuple(np.atleast_2d(np.asarray(c, dtype=complex)) for c in self.C)
        Q = tuple(np.atleast_2d(np.asarray(q, dtype=complex)) for q in self.Q)
        h, x = A.shape
        if not (len(T) == len(C) == len(Q)) or not T:
            raise ValueError("T, C and Q must have the same positive length n")
        for t in T:
            if t.shape != (h, h):
                raise ValueError(f"T_i must be {h}x{h}, got {t.shape}")
        for c, q in zip(C, Q):
            if c.shape[0] != x or q.shape != c.shape:
                raise ValueError(f"C_i and Q_i must both map G_i into X (dim {x})")
        for name, val in (("A", A), ("T", T), ("C", C), ("Q", Q)):
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return len(self.T)

    @property
    def hdim(self) -> int:
        return self.A.shape[0]

    @property
    def xdim(self) -> int:
        return self.A.shape[1]

    @property
    def gdims(self) -> list[int]:
        return [c.shape[1] for c in self.C]

    def to_dict(self) -> dict:
        return {
            "A": matrix_to_dict(self.A),
            "T": [matrix_to_dict(t) for t in self.T],
            "C": [matrix_to_dict(c) for c in self.C],
            "Q": [matrix_to_dict(q) for q in self.Q],
        }

    @classmethod
    def from_dict(cls, d) -> LiftingData:
        return cls(matrix_from_dict(d["A"]), tuple(matrix_from_dict(t) for t in d["T"]),
                   tuple(matrix_from_dict(c) for c in d["C"]), tuple(matrix_from_dict(q) for q in d["Q"]))


def _row(T: Sequence[np.ndarray]) -> np.ndarray:
    return np.hstack(list(T))


def validate_data(data: LiftingData, tol: float = DATA_TOL) -> Report:
    rep = Report("lifting-data")
    h, x = data.hdim, data.xdim
    rep.eigen("row_contraction", min_eig(np.eye(h) - _row(data.T) @ adj(_row(data.T))), tol)
    rep.eigen("A_contraction", min_eig(np.eye(x) - adj(data.A) @ data.A), tol)
    Qrow = _row(data.Q)
    gram = adj(Qrow) @ Qrow
    diag = block_diag(*[adj(c) @ c for c in data.C]) if data.n else np.zeros((0, 0))
    rep.eigen("C_Q_inequality", min_eig(gram - diag), tol)
    worst = max(fro(t @ data.A @ c - data.A @ q) for t, c, q in zip(data.T, data.C, data.Q))
    rep.residual("intertwining", worst, tol)
    return rep


# dilation

@dataclass(frozen=True, eq=False)
class DilationSpace:
    """V_i = [[T_i, 0], [Delta_i, I_D (x) S_i]] on K = H (+) D (x) F^2_m."""

    T: tuple[np.ndarray, ...]
    basis: FockBasis
    V: tuple[np.ndarray, ...]
    delta: tuple[np.ndarray, ...]
    defect: Defect

    @property
    def hdim(self) -> int:
        return self.T[0].shape[0]

    @property
    def ddim(self) -> int:
        return self.defect.rank

    @property
    def kdim(self) -> int:
        return self.hdim + self.ddim * self.basis.dim

    def block_rows(self, d: int) -> np.ndarray:
        """Indices of H (+) D (x) P^(d) inside K."""
        keep = self.basis.dim_upto(d)
        tail = [self.hdim + j * self.basis.dim + f for j in range(self.ddim) for f in range(keep)]
        return np.array(list(range(self.hdim)) + tail, dtype=int)


def minimal_isometric_dilation(T: Sequence[np.ndarray], basis: FockBasis, tol: float = DATA_TOL) -> DilationSpace:
    T = tuple(np.asarray(t, dtype=complex) for t in T)
    if len(T) != basis.n:
        raise ValueError(f"expected {basis.n} operators, got {len(T)}")
    if row_norm(T) > 1.0 + tol:
        raise ValueError("T is not a row contraction")
    h = T[0].shape[0]
    dT = defect(_row(T))
    d, fd = dT.rank, basis.dim
    coords = dT.coords  # D_T as a map H^(n) -> D
    V, deltas = [], []
    for i, Ti in enumerate(T):
        Delta = np.zeros((d * fd, h), dtype=complex)
        Delta[np.arange(d) * fd] = coords[:, i * h:(i + 1) * h]
        Vi = np.zeros((h + d * fd, h + d * fd), dtype=complex)
        Vi[:h, :h] = Ti
        Vi[h:, :h] = Delta
        Vi[h:, h:] = np.kron(np.eye(d), basis.creation(i + 1, "left"))
        V.append(Vi)
        deltas.append(Delta)
    return DilationSpace(T, basis, tuple(V), tuple(deltas), dT)


def dilation_report(dil: DilationSpace, tol: float = 1e-12) -> Report:
    rep = Report("dilation")
    h = dil.hdim
    safe = dil.block_rows(dil.basis.m - 1)
    worst_adj, worst_iso = 0.0, 0.0
    for i, Vi in enumerate(dil.V):
        worst_adj = max(worst_adj, fro(adj(Vi)[:h, :h] - adj(dil.T[i])) + fro(adj(Vi)[h:, :h]))
        for j, Vj in enumerate(dil.V):
            P = (adj(Vi) @ Vj)[np.ix_(safe, safe)]
            worst_iso = max(worst_iso, fro(P - (i == j) * np.eye(len(safe))))
    rep.residual("adjoint_restricts_to_T", worst_adj, tol)
    rep.residual("isometric_below_ceiling", worst_iso, tol)
    rep.eigen("row_contraction", min_eig(np.eye(dil.kdim) - sum(V @ adj(V) for V in dil.V)), tol)
    return rep


# Omega, Lambda, constrained Schur columns

@dataclass(frozen=True, eq=False)
class OmegaPair:
    """Omega = [Omega1; Omega2]: F -> D (+) D_A^(n), in orthonormal coordinates.

    F_basis and G_basis live in D_A coordinates, G being the complement of F.
    """

    n: int
    DA: Defect
    DT: Defect
    F_basis: np.ndarray
    G_basis: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray

    @property
    def omega(self) -> np.ndarray:
        return np.vstack([self.omega1, self.omega2])

    @property
    def adim(self) -> int:
        return self.DA.rank

    @property
    def ddim(self) -> int:
        return self.DT.rank

    @property
    def fdim(self) -> int:
        return self.F_basis.shape[1]

    @property
    def gdim(self) -> int:
        return self.G_basis.shape[1]

    @property
    def is_isometric(self) -> bool:
        O = self.omega
        return fro(adj(O) @ O - np.eye(self.fdim)) <= 1e-9

    def star_defect(self) -> Defect:
        """(I - Omega Omega^*)^{1/2} on D (+) D_A^(n)."""
        return defect(adj(self.omega))


def build_omega(data: LiftingData, tol: float = 1e-9) -> OmegaPair:
    DA = defect(data.A)
    DT = defect(_row(data.T))
    Qrow = _row(data.Q)
    Z = DA.coords @ Qrow
    Fb = range_basis(Z)
    G = complement_basis(Fb, DA.rank)
    Zf = adj(Fb) @ Z
    N1 = DT.coords @ block_diag(*[data.A @ c for c in data.C])
    N2 = block_diag(*[DA.coords @ c for c in data.C])
    N = np.vstack([N1, N2])
    if Fb.shape[1] == 0:
        O = np.zeros((N.shape[0], 0), dtype=complex)
    else:
        O = N @ np.linalg.pinv(Zf)
    resid = fro(O @ Zf - N)
    if resid > tol * max(1.0, fro(N)):
        raise ValueError(f"Omega is not well defined (residual {resid:.3e}); data invalid")
    d = DT.rank
    return OmegaPair(data.n, DA, DT, Fb, G, O[:d], O[d:])


@dataclass(frozen=True, eq=False)
class LambdaMap:
    """Lambda: F_Gamma -> D_Gamma^(n) with F_Gamma given in D_Gamma coordinates."""

    matrix: np.ndarray
    F_basis: np.ndarray
    DG: Defect

    @property
    def is_isometric(self) -> bool:
        L = self.matrix
        return fro(adj(L) @ L - np.eye(L.shape[1])) <= 1e-9

    def parameter(self, n: int) -> list[np.ndarray]:
        """Constant parameter Lambda P_F split into n blocks D_Gamma -> D_Gamma."""
        full = self.matrix @ adj(self.F_basis)
        k = self.DG.rank
        return [full[i * k:(i + 1) * k] for i in range(n)]


def build_lambda(sym: Symbol, omega: OmegaPair, tol: float = 1e-9) -> LambdaMap:
    """Lambda D_Gamma x = (+) D_Gamma Omega2 x on x in F."""
    DG = defect(sym.gamma)
    k = DG.rank
    img = DG.coords @ omega.F_basis
    Fg = range_basis(img)
    lhs = adj(Fg) @ img
    rhs = block_diag(*[DG.coords] * omega.n) @ omega.omega2 if k else np.zeros((0, omega.fdim))
    if Fg.shape[1] == 0:
        Lam = np.zeros((rhs.shape[0], 0), dtype=complex)
    else:
        Lam = rhs @ np.linalg.pinv(lhs)
    resid = fro(Lam @ lhs - rhs)
    if resid > tol * max(1.0, fro(rhs)):
        raise ValueError(f"Lambda is not well defined (residual {resid:.3e}); Gamma does not solve the lifting")
    return LambdaMap(Lam, Fg, DG)


def zero_parameter(omega: OmegaPair, basis: FockBasis) -> FreeSeries:
    o = omega.star_defect().rank
    return FreeSeries.zero(basis.n, basis.m, o, omega.gdim)


def constrained_schur(omega: OmegaPair, psi1: FreeSeries, basis: FockBasis,
                      tol: float = 1e-9) -> SchurColumn:
    """Psi = Omega P_F (x) I + (D_{Omega^*} (x) I) Psi1 (P_G (x) I), split as [L; M_1..M_n]."""
    DO = omega.star_defect()
    if psi1.shape != (DO.rank, omega.gdim):
        raise ValueError(f"free parameter must map G (dim {omega.gdim}) into the "
                         f"defect of Omega^* (dim {DO.rank}), got {psi1.shape}")
    if psi1.rows and psi1.cols and hinf_norm(psi1, basis) > 1.0 + tol:
        raise ValueError("free parameter is outside the unit ball")
    left = DO.basis * DO.values
    right = adj(omega.G_basis)
    coeffs = {w: left @ P @ right for w, P in psi1.coeffs.items() if len(w) <= basis.m}
    base = omega.omega @ adj(omega.F_basis)
    coeffs[EMPTY] = coeffs.get(EMPTY, 0) + base
    a, d = omega.adim, omega.ddim
    psi = FreeSeries(basis.n, basis.m, d + basis.n * a, a, coeffs)
    L = psi.map_coeffs(lambda P: P[:d], d, a)
    M = tuple(psi.map_coeffs(lambda P, i=i: P[d + i * a:d + (i + 1) * a], a, a) for i in range(basis.n))
    return SchurColumn(L, M)


# solving and verifying

@dataclass(frozen=True, eq=False)
class GnclSolution:
    B: np.ndarray
    theta: FreeSeries
    symbol: Symbol
    column: SchurColumn
    dilation: DilationSpace
    omega: OmegaPair
    report: Report

    def to_dict(self) -> dict:
        return {"B": matrix_to_dict(self.B), "Theta": self.theta.to_dict(), "report": self.report.to_dict()}


def assemble(data: LiftingData, sym: Symbol, DA: Defect) -> np.ndarray:
    return np.vstack([data.A, sym.gamma @ DA.coords])


def solve_gncl(data: LiftingData, psi1: FreeSeries | None, basis: FockBasis,
               tol_norm: float = 1e-9, tol_res: float = 1e-8) -> GnclSolution:
    check = validate_data(data)
    if not check.passed:
        raise InvalidData(check)
    omega = build_omega(data)
    if psi1 is None:
        psi1 = zero_parameter(omega, basis)
    col = constrained_schur(omega, psi1, basis)
    theta = reconstruct_theta(col, basis)
    sym = symbol(theta, basis)
    dil = minimal_isometric_dilation(data.T, basis)
    B = assemble(data, sym, omega.DA)
    rep = verify_interpolant(data, B, dil, tol_norm, tol_res)
    return GnclSolution(B, theta, sym, col, dil, omega, rep)


def verify_interpolant(data: LiftingData, B: np.ndarray, dil: DilationSpace,
                       tol_norm: float = 1e-9, tol_res: float = 1e-8) -> Report:
    rep = Report("interpolant")
    h = data.hdim
    if B.shape != (dil.kdim, data.xdim):
        raise ValueError(f"B has shape {B.shape}, expected {(dil.kdim, data.xdim)}")
    rep.residual("contraction", op_norm(B), 1.0 + tol_norm)
    rep.residual("lifts_A", fro(B[:h] - data.A), 0.0)
    rows = dil.block_rows(dil.basis.m - 1)
    worst = max(fro((V @ B @ c - B @ q)[rows]) for V, c, q in zip(dil.V, data.C, data.Q))
    rep.residual("intertwining", worst, tol_res)
    return rep


def omega_restriction_residual(col: SchurColumn, omega: OmegaPair) -> float:
    """How far the column is from restricting to Omega on F (constant) and to 0 above degree 0."""
    stacked = col.stacked()
    worst = fro(stacked.coeff(EMPTY) @ omega.F_basis - omega.omega)
    for w, P in stacked.coeffs.items():
        if w:
            worst = max(worst, fro(P @ omega.F_basis))
    return worst


def nclt_uniqueness(data: LiftingData, tol: float = DATA_TOL) -> bool:
    """Uniqueness test for data of the form C_i = I, Q_i = Y_i with Y a row isometry."""
    x = data.xdim
    for c in data.C:
        if c.shape != (x, x) or fro(c - np.eye(x)) > tol:
            raise ValueError("data not in NCL form: C_i must be the identity")
    Y = _row(data.Q)
    if fro(adj(Y) @ Y - np.eye(Y.shape[1])) > tol:
        raise ValueError("data not in NCL form: Q must be a row isometry")
    omega = build_omega(data)
    target = omega.ddim + data.n * omega.adim
    surjective = range_basis(omega.omega).shape[1] == target if omega.fdim else target == 0
    return omega.fdim == omega.adim or surjective


def parameter_space_trivial(omega: OmegaPair) -> bool:
    """True when the free parameter space is a single point (G = 0 or D_{Omega^*} = 0)."""
    return omega.gdim == 0 or omega.star_defect().rank == 0


def recover_parameter(data: LiftingData, B: np.ndarray, basis: FockBasis) -> tuple[FreeSeries, LambdaMap, SchurColumn, Report]:
    """Completeness path: from a solution B rebuild Theta, Lambda and the column for Phi = Lambda P_F."""
    omega = build_omega(data)
    h = data.hdim
    d = omega.ddim
    low = B[h:]
    DA = omega.DA
    gamma = low @ np.linalg.pinv(DA.coords) if DA.rank else np.zeros((low.shape[0], 0), dtype=complex)
    sym0 = Symbol(gamma, d, DA.rank, basis)
    theta = FreeSeries(basis.n, basis.m, d, DA.rank, {w: sym0.coefficient(w) for w in basis.words})
    sym = symbol(theta, basis)
    lam = build_lambda(sym, omega)
    k = majorant_setup(theta, basis).k
    phi = [FreeSeries.constant(basis.n, basis.m, P) if k else FreeSeries.zero(basis.n, basis.m, 0, 0)
           for P in lam.parameter(basis.n)]
    col = j_forward(theta, phi, basis)
    rep = Report("completeness")
    rep.residual("theta_reproduced", reconstruct_theta(col, basis).max_coeff_diff(theta), 1e-8)
    rep.residual("gamma_recovered", fro(sym.gamma - gamma), 1e-8)
    M = np.vstack([Mi.coeff(EMPTY) for Mi in col.M]) @ omega.F_basis
    worst = fro(M - omega.omega2)
    for Mi in col.M:
        for w, P in Mi.coeffs.items():
            if w:
                worst = max(worst, fro(P @ omega.F_basis))
    rep.residual("M_restricts_to_Omega2", worst, 1e-8)
    return theta, lam, col, rep


# weighted lifting

@dataclass(frozen=True, eq=False)
class WeightedProblem:
    """Reduction of a weighted lifting to plain data on X~ = range(P^{1/2}).

    ``root`` is P^{1/2} written as a map X -> X~ in orthonormal coordinates.
    """

    data: LiftingData
    root: np.ndarray
    P: np.ndarray
    A: np.ndarray
    Y: tuple[np.ndarray, ...]

    def lift(self, B_reduced: np.ndarray) -> np.ndarray:
        return B_reduced @ self.root


def weighted_reduce(A: np.ndarray, P: np.ndarray, Y: Sequence[np.ndarray], T: Sequence[np.ndarray],
                    tol: float = DATA_TOL) -> WeightedProblem:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    P = np.asarray(P, dtype=complex)
    Y = tuple(np.asarray(y, dtype=complex) for y in Y)
    if min_eig(P - adj(A) @ A) < -tol:
        raise ValueError("A^* A is not dominated by P")
    w, U = np.linalg.eigh(0.5 * (P + adj(P)))
    keep = w > tol * max(1.0, float(w[-1]) if w.size else 1.0)
    Uk, s = U[:, keep], np.sqrt(w[keep])
    root = s[:, None] * adj(Uk)
    A_red = (A @ Uk) / s
    data = LiftingData(A_red, tuple(T), tuple(root for _ in Y), tuple(root @ y for y in Y))
    return WeightedProblem(data, root, P, A, Y)


def solve_weighted(prob: WeightedProblem, psi1: FreeSeries | None, basis: FockBasis,
                   tol_eig: float = 1e-8, tol_res: float = 1e-8) -> tuple[np.ndarray, GnclSolution, Report]:
    sol = solve_gncl(prob.data, psi1, basis)
    B = prob.lift(sol.B)
    rep = Report("weighted")
    rep.eigen("B_star_B_below_P", min_eig(prob.P - adj(B) @ B), tol_eig)
    rep.residual("lifts_A", fro(B[:prob.A.shape[0]] - prob.A), tol_res)
    rows = sol.dilation.block_rows(basis.m - 1)
    worst = max(fro((V @ B - B @ y)[rows]) for V, y in zip(sol.dilation.V, prob.Y))
    rep.residual("intertwining", worst, tol_res)
    return B, sol, rep
