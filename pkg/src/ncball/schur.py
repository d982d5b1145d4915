"""Linear-fractional representation of the unit ball of H^2 by Schur-class columns.

Theta = L (I - sum_i X_i M_i)^{-1} where [L; M_1; ...; M_n] is contractive. For a
fixed Theta the columns producing it are in bijection with Schur-class
parameters Phi on the defect space of the symbol (``j_forward``/``j_inverse``).

Internally the forward map works one degree above the Fock truncation so the
returned M_i are exact through degree m; evaluating the column at the
nilpotent right-creation tuple then needs no unknown coefficients.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .fock import EMPTY, FockBasis
from .freeseries import FreeSeries, hinf_norm, inverse, multiply, neumann_inverse, radial_eval, vstack
from .linalg import op_norm
from .majorant import majorant_setup, param_from_majorant
from .report import Report
from .transforms import cayley, inverse_cayley


class InconsistentColumn(ValueError):
    """The column does not represent the given function."""


@dataclass(frozen=True, eq=False)
class SchurColumn:
    L: FreeSeries
    M: tuple[FreeSeries, ...]

    def __post_init__(self):
        object.__setattr__(self, "M", tuple(self.M))
        if len(self.M) != self.L.n:
            raise ValueError(f"need {self.L.n} M-series, got {len(self.M)}")
        e = self.L.cols
        if any(Mi.shape != (e, e) for Mi in self.M):
            raise ValueError("each M_i must act on the column space of L")

    @property
    def n(self) -> int:
        return self.L.n

    def stacked(self) -> FreeSeries:
        return vstack([self.L, *self.M])

    def psi(self) -> FreeSeries:
        return left_letter_join(self.M)

    def norm_estimate(self, basis: FockBasis) -> float:
        return hinf_norm(self.stacked(), basis)

    def max_coeff_diff(self, other: SchurColumn, upto: int | None = None) -> float:
        diffs = [self.L.max_coeff_diff(other.L, upto)]
        diffs += [a.max_coeff_diff(b, upto) for a, b in zip(self.M, other.M)]
        return max(diffs)

    def to_dict(self) -> dict:
        return {"L": self.L.to_dict(), "M": [Mi.to_dict() for Mi in self.M]}

    @classmethod
    def from_dict(cls, d) -> SchurColumn:
        return cls(FreeSeries.from_dict(d["L"]), tuple(FreeSeries.from_dict(x) for x in d["M"]))


def left_letter_split(psi: FreeSeries, tol: float = 1e-12) -> list[FreeSeries]:
    """M_i with coefficient at w equal to the coefficient of psi at (i,) + w."""
    if op_norm(psi.coeff(EMPTY)) > tol:
        raise ValueError("series must vanish at the origin")
    cap = max(psi.max_degree - 1, 0)
    parts: list[dict] = [{} for _ in range(psi.n)]
    for w, A in psi.coeffs.items():
        if w:
            parts[w[0] - 1][w[1:]] = A
    return [FreeSeries(psi.n, cap, psi.rows, psi.cols, p) for p in parts]


def left_letter_join(M: Sequence[FreeSeries]) -> FreeSeries:
    """sum_i X_i M_i, the inverse of left_letter_split."""
    n = M[0].n
    if len(M) != n:
        raise ValueError(f"need {n} series, got {len(M)}")
    coeffs = {}
    for i, Mi in enumerate(M, start=1):
        for w, A in Mi.coeffs.items():
            coeffs[(i,) + w] = A
    cap = max(Mi.max_degree for Mi in M) + 1
    return FreeSeries(n, cap, M[0].rows, M[0].cols, coeffs)


def _check_params(phi: Sequence[FreeSeries], n: int, k: int):
    if len(phi) != n:
        raise ValueError(f"need {n} parameter series, got {len(phi)}")
    for p in phi:
        if p.shape != (k, k):
            raise ValueError(f"parameters must act on the {k}-dimensional defect space, got {p.shape}")


def j_forward(theta: FreeSeries, phi: Sequence[FreeSeries], basis: FockBasis,
              tol: float = 1e-9) -> SchurColumn:
    """Column [L; M] representing theta, labelled by the parameter phi = (phi_1, ..., phi_n)."""
    s = majorant_setup(theta, basis)
    _check_params(phi, basis.n, s.k)
    cap = basis.m + 1
    W = s.W.with_cap(cap)
    if s.k:
        if hinf_norm(vstack(phi), basis) > 1.0 + tol:
            raise ValueError("parameter column is outside the unit ball")
        chi = left_letter_join([p.truncate(basis.m) for p in phi]).with_cap(cap)
        left, right = s.dressing()
        F = W + inverse_cayley(chi).lmul(left).rmul(right)
    else:
        F = W
    M = left_letter_split(cayley(F))
    I = FreeSeries.identity(basis.n, cap, theta.cols)
    L = multiply(theta.with_cap(cap), inverse(F + I)).scale(2.0).truncate(basis.m)
    return SchurColumn(L, tuple(Mi.truncate(basis.m) for Mi in M))


def reconstruct_theta(col: SchurColumn, basis: FockBasis) -> FreeSeries:
    """Theta = L (I - sum X_i M_i)^{-1} through degree basis.m."""
    cap = basis.m
    psi = col.psi().with_cap(cap)
    return multiply(col.L.with_cap(cap), neumann_inverse(psi)).truncate(cap)


def j_inverse(theta: FreeSeries, col: SchurColumn, basis: FockBasis,
              tol: float = 1e-8) -> list[FreeSeries]:
    """Parameter phi with j_forward(theta, phi) = col."""
    gap = reconstruct_theta(col, basis).max_coeff_diff(theta, basis.m)
    if gap > tol:
        raise InconsistentColumn(f"column reproduces theta only to {gap:.3e}")
    s = majorant_setup(theta, basis)
    if s.k == 0:
        return [FreeSeries.zero(basis.n, basis.m, 0, 0) for _ in range(basis.n)]
    F = inverse_cayley(col.psi().with_cap(basis.m + 1))
    chi = param_from_majorant(theta, F, basis, tol)
    return left_letter_split(chi)


def schur_membership(f: FreeSeries, basis: FockBasis, r_grid: Sequence[float],
                     tol: float = 1e-9) -> Report:
    rep = Report("schur-membership")
    worst = 0.0
    for r in sorted(set(float(x) for x in r_grid)):
        worst = max(worst, op_norm(radial_eval(f, r, basis, "right")))
    rep.values["sup_norm_estimate"] = worst
    rep.residual("norm_estimate", worst, 1.0 + tol, note="truncation estimate: a necessary condition only")
    return rep
