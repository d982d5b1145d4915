"""The eleven acceptance checks, shared by the test-suite and ``ncball selftest``.

Every check draws from its own generator seeded with (seed, check number), and
the functions shared by checks 2-4 come from (seed, 0), so results do not
depend on the order or thread in which checks run.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .fock import EMPTY, FockBasis, compress
from .freeseries import FreeSeries, h2_norm, radial_eval, row_block
from .lifting import (build_omega, dilation_report, minimal_isometric_dilation, nclt_uniqueness,
                      solve_gncl, solve_weighted, weighted_reduce)
from .linalg import adj, fro, herm, min_eig, op_norm
from .majorant import (defect_residual, is_subpluriharmonic, least_majorant, majorant_from_param,
                       majorant_setup, param_from_majorant, real_part_curve, theta_curve)
from .report import Report
from .sampling import (random_gncl_data, random_row_contraction, random_schur, random_schur_params,
                       random_series, random_theta, random_unitary, random_weighted_instance,
                       unitary_ncl_data)
from .schur import SchurColumn, j_forward, j_inverse, reconstruct_theta
from .transforms import (cayley, herglotz_moments, herglotz_series, inverse_cayley,
                         poisson_kernel)


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    run: Callable[[RunConfig, np.random.Generator], Report]


def _rng(cfg: RunConfig, number: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, number])


def _dims(rng) -> tuple[int, int]:
    return int(rng.integers(1, 3)), int(rng.integers(1, 3))


def poisson_moments(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(2, 4)
    S = basis.creation_tuple("left")
    kernel = poisson_kernel(S, basis)
    prods = {EMPTY: np.eye(basis.dim)}
    for w in basis.words[1:]:
        prods[w] = S[w[0] - 1] @ prods[w[1:]]
    worst = 0.0
    short = [w for w in basis.words if len(w) <= 3]
    for a in short:
        for b in short:
            target = prods[a] @ adj(prods[b])
            worst = max(worst, op_norm(kernel.transform(target) - target))
    rep = Report("poisson-moments")
    rep.flag("kernel_exact", kernel.exact)
    rep.residual("moment_identity", worst, 1e-12)
    return rep


def _shared_thetas(cfg: RunConfig) -> list[FreeSeries]:
    """The ten functions used by the defect, sub-pluriharmonicity and two-formula checks."""
    return _thetas(cfg, np.random.default_rng([cfg.seed, 0]))


def _thetas(cfg: RunConfig, rng, count: int = 10) -> list[FreeSeries]:
    out = []
    for _ in range(count):
        rows, cols = _dims(rng)
        out.append(random_theta(rng, cfg.n, cfg.m, rows, cols, degree=int(rng.integers(1, 3))))
    return out


def defect_identity(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(cfg.n, cfg.m)
    rep = Report("defect-identity")
    worst, worst_boundary = 0.0, 0.0
    for theta in _shared_thetas(cfg):
        for r in (0.3, 0.6, 0.9, 1.0):
            worst = max(worst, defect_residual(theta, r, basis))
        d = basis.m - theta.degree - 1
        reW = herm(radial_eval(least_majorant(theta, basis), 1.0, basis))
        TT = theta_curve(theta)(1.0, basis)
        worst_boundary = max(worst_boundary, fro(compress(reW - TT, basis, d)))
    rep.residual("defect_residual", worst, cfg.tol_residual)
    rep.residual("boundary_equality", worst_boundary, cfg.tol_residual)
    return rep


def subpluriharmonic(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(cfg.n, cfg.m)
    rep = Report("sub-pluriharmonic")
    worst_eig, worst_gap = np.inf, 0.0
    ok = True
    for theta in _shared_thetas(cfg):
        sub = is_subpluriharmonic(theta_curve(theta), cfg.r_grid, None, basis, cfg.tol_eig)
        ok &= sub.passed
        eigs = [c.min_eigenvalue for c in sub.checks if c.name.startswith("poisson_domination")]
        worst_eig = min([worst_eig, *eigs])
        ctrl = is_subpluriharmonic(real_part_curve(least_majorant(theta, basis)), cfg.r_grid, None,
                                   basis, cfg.tol_eig)
        worst_gap = max(worst_gap, ctrl.values["max_equality_gap"])
    rep.flag("all_checks", ok)
    rep.eigen("poisson_domination", worst_eig, cfg.tol_eig)
    rep.residual("control_equality", worst_gap, 1e-9)
    return rep


def _scalar_eval(f: FreeSeries, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z, dtype=complex)
    for w, A in f.coeffs.items():
        out += A[0, 0] * z ** len(w)
    return out


def least_majorant_oracles(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(cfg.n, cfg.m)
    rep = Report("least-majorant")
    worst = 0.0
    for theta in _shared_thetas(cfg):
        W = least_majorant(theta, basis)
        H = herglotz_series(herglotz_moments(theta, basis))
        worst = max(worst, W.max_coeff_diff(H))
    rep.residual("two_formulas", worst, 1e-12)

    b1 = FockBasis(1, cfg.m)
    theta = FreeSeries.from_terms(1, cfg.m, {(): 0.5, (1,): 0.5})
    W = least_majorant(theta, b1)
    expected = FreeSeries.from_terms(1, cfg.m, {(): 0.5, (1,): 0.5})
    rep.residual("scalar_W", W.max_coeff_diff(expected), 1e-12)
    # classical Poisson integral of |theta|^2 on the circle, trapezoid rule
    t = 2 * np.pi * np.arange(4096) / 4096
    boundary = np.abs(_scalar_eval(theta, np.exp(1j * t))) ** 2
    z = 0.9 * np.exp(2j * np.pi * np.arange(64) / 64)
    kern = (1 - np.abs(z[:, None]) ** 2) / np.abs(np.exp(1j * t)[None, :] - z[:, None]) ** 2
    quad = (kern * boundary[None, :]).mean(axis=1)
    rep.residual("scalar_herglotz_quadrature", float(np.max(np.abs(_scalar_eval(W, z).real - quad))), 1e-6)
    edge = np.exp(2j * np.pi * np.arange(64) / 64)
    gap = np.max(np.abs(_scalar_eval(W, edge).real - np.abs(_scalar_eval(theta, edge)) ** 2))
    rep.residual("scalar_boundary", float(gap), 1e-12)
    return rep


def majorant_family(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(cfg.n, cfg.m)
    rep = Report("majorant-family")
    worst_dom, worst_w, worst_rt = np.inf, np.inf, 0.0
    for theta in _thetas(cfg, rng, 20):
        s = majorant_setup(theta, basis)
        G = random_schur(rng, basis, s.k, s.k, level=rng.uniform(0.3, 0.95), zero_constant=True)
        F = majorant_from_param(theta, G, basis)
        reF = herm(radial_eval(F, 1.0, basis))
        reW = herm(radial_eval(s.W, 1.0, basis))
        worst_dom = min(worst_dom, min_eig(reF - theta_curve(theta)(1.0, basis)))
        worst_w = min(worst_w, min_eig(reF - reW))
        worst_rt = max(worst_rt, param_from_majorant(theta, F, basis).max_coeff_diff(G, basis.m))
    rep.eigen("F_dominates_theta", worst_dom, cfg.tol_eig)
    rep.eigen("F_dominates_W", worst_w, cfg.tol_eig)
    rep.residual("parameter_round_trip", worst_rt, cfg.tol_residual)
    return rep


def cayley_bijection(cfg: RunConfig, rng) -> Report:
    rep = Report("cayley")
    worst_f, worst_g = 0.0, 0.0
    for _ in range(20):
        k = int(rng.integers(1, 4))
        g = random_series(rng, cfg.n, cfg.m, k, k, zero_constant=True).scale(0.5)
        worst_g = max(worst_g, cayley(inverse_cayley(g)).max_coeff_diff(g, cfg.m))
        f = FreeSeries.identity(cfg.n, cfg.m, k) + random_series(rng, cfg.n, cfg.m, k, k, zero_constant=True)
        worst_f = max(worst_f, inverse_cayley(cayley(f)).max_coeff_diff(f, cfg.m))
    rep.residual("inverse_then_forward", worst_g, 1e-10)
    rep.residual("forward_then_inverse", worst_f, 1e-10)
    return rep


def schur_bijection(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(cfg.n, cfg.m)
    rep = Report("schur")
    upto = basis.m - 1
    worst_phi, worst_col = 0.0, 0.0
    for theta in _thetas(cfg, rng, 20):
        k = majorant_setup(theta, basis).k
        phi = random_schur_params(rng, basis, k, level=rng.uniform(0.3, 0.95))
        col = j_forward(theta, phi, basis)
        back = j_inverse(theta, col, basis)
        worst_phi = max([worst_phi, *(a.max_coeff_diff(b, upto) for a, b in zip(back, phi))])
        worst_col = max(worst_col, j_forward(theta, back, basis).max_coeff_diff(col, upto))
    rep.residual("parameter_round_trip", worst_phi, cfg.tol_residual)
    rep.residual("column_round_trip", worst_col, cfg.tol_residual)
    worst_h2 = 0.0
    for _ in range(50):
        y, e = _dims(rng)
        stacked = random_schur(rng, basis, y + basis.n * e, e, level=rng.uniform(0.5, 1.0))
        L = row_block(stacked, 0, y)
        M = tuple(row_block(stacked, y + i * e, y + (i + 1) * e) for i in range(basis.n))
        worst_h2 = max(worst_h2, h2_norm(reconstruct_theta(SchurColumn(L, M), basis)))
    rep.residual("reconstructed_h2_norm", worst_h2, 1.0 + 1e-6)
    return rep


def gncl_soundness(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(2, cfg.m)
    rep = Report("gncl")
    norm, lifts, inter = 0.0, 0.0, 0.0
    canonical = True
    for _ in range(10):
        data = random_gncl_data(rng, 2, 1, 3)
        omega = build_omega(data)
        o = omega.star_defect().rank
        for p in range(5):
            psi1 = None if p == 0 else random_schur(rng, basis, o, omega.gdim, level=rng.uniform(0.3, 0.99))
            sol = solve_gncl(data, psi1, basis, tol_res=cfg.tol_residual)
            checks = {c.name: c.residual for c in sol.report.checks}
            norm = max(norm, checks["contraction"])
            lifts = max(lifts, checks["lifts_A"])
            inter = max(inter, checks["intertwining"])
            if p == 0:
                canonical &= sol.report.passed
    rep.residual("sigma_max", norm, 1.0 + 1e-9)
    rep.residual("lifts_A", lifts, 0.0)
    rep.residual("intertwining", inter, cfg.tol_residual)
    rep.flag("canonical_solution", canonical)
    return rep


def nclt(cfg: RunConfig, rng) -> Report:
    rep = Report("nclt")
    rep.flag("unitary_A_unique", nclt_uniqueness(unitary_ncl_data(rng, 2)))
    basis = FockBasis(2, cfg.m)
    for _ in range(50):
        data = random_gncl_data(rng, 2, 1, 3)
        omega = build_omega(data)
        o = omega.star_defect().rank
        if omega.gdim and o:
            break
    else:
        rep.flag("nontrivial_parameter_space", False)
        return rep
    B0 = solve_gncl(data, None, basis).B
    B1 = solve_gncl(data, random_schur(rng, basis, o, omega.gdim), basis).B
    dist = fro(B0 - B1)
    rep.values["distance"] = dist
    rep.flag("distinct_solutions", dist > 1e-10, f"Frobenius distance {dist:.3e}")
    return rep


def weighted(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(1, cfg.m)
    rep = Report("weighted")
    worst_eig, worst_res = np.inf, 0.0
    for t in range(5):
        A, P, Y, T = random_weighted_instance(rng, 3, 3, rank_deficient=bool(t % 2))
        prob = weighted_reduce(A, P, Y, T)
        omega = build_omega(prob.data)
        o = omega.star_defect().rank
        psi1 = random_schur(rng, basis, o, omega.gdim) if omega.gdim and o else None
        _, _, sub = solve_weighted(prob, psi1, basis)
        checks = {c.name: c for c in sub.checks}
        worst_eig = min(worst_eig, checks["B_star_B_below_P"].min_eigenvalue)
        worst_res = max(worst_res, checks["intertwining"].residual)
    rep.eigen("P_minus_BB", worst_eig, 1e-8)
    rep.residual("intertwining", worst_res, 1e-8)
    return rep


def dilation(cfg: RunConfig, rng) -> Report:
    basis = FockBasis(2, cfg.m)
    rep = Report("dilation")
    for t in range(3):
        T = random_row_contraction(rng, 2, int(rng.integers(1, 4)), rng.uniform(0.3, 0.95))
        rep.extend(dilation_report(minimal_isometric_dilation(T, basis), 1e-12), f"trial{t}.")
    # a row isometry of finitely many matrices forces n = 1, i.e. a unitary
    U = random_unitary(rng, 3)
    dil = minimal_isometric_dilation([U], FockBasis(1, cfg.m))
    rep.flag("row_isometry_collapses", dil.kdim == dil.hdim, f"dim K = {dil.kdim}")
    return rep


CRITERIA = (
    Criterion(1, "poisson moment identity", poisson_moments),
    Criterion(2, "defect identity", defect_identity),
    Criterion(3, "sub-pluriharmonicity", subpluriharmonic),
    Criterion(4, "least majorant formulas and scalar oracle", least_majorant_oracles),
    Criterion(5, "majorant family", majorant_family),
    Criterion(6, "cayley bijection", cayley_bijection),
    Criterion(7, "schur bijection", schur_bijection),
    Criterion(8, "gncl soundness", gncl_soundness),
    Criterion(9, "nclt uniqueness", nclt),
    Criterion(10, "weighted lifting", weighted),
    Criterion(11, "isometric dilation", dilation),
)


def run_criterion(c: Criterion, cfg: RunConfig) -> tuple[Report, float]:
    start = time.perf_counter()
    try:
        rep = c.run(cfg, _rng(cfg, c.number))
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        rep = Report(c.name)
        rep.flag("completed", False, f"{type(exc).__name__}: {exc}")
    return rep, time.perf_counter() - start


def run_all(cfg: RunConfig, threads: int = 1) -> list[tuple[Criterion, Report, float]]:
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(lambda c: run_criterion(c, cfg), CRITERIA))
    return [(c, rep, dt) for c, (rep, dt) in zip(CRITERIA, results)]


def summary_line(c: Criterion, rep: Report) -> str:
    verdict = "PASS" if rep.passed else "FAIL"
    bad = ", ".join(f.name for f in rep.failures())
    return f"[{verdict}] {c.number:>2}. {c.name}" + (f" (failed: {bad})" if bad else "")
