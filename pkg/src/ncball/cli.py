"""ncball command line: majorant, lift, dilate, schur-roundtrip and selftest.

JSON goes to --out (or stdout); the human-readable table goes to stderr.
Exit codes: 0 pass, 2 parse or usage error, 3 invalid input data,
4 numerical failure (including a failed verification).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import acceptance
from .config import RunConfig, thread_cap
from .fock import FockBasis
from .freeseries import FreeSeries, TruncationError, h2_norm, matrix_from_dict
from .lifting import (InvalidData, LiftingData, build_omega, dilation_report, minimal_isometric_dilation,
                      solve_gncl, validate_data)
from .majorant import defect_residual, is_subpluriharmonic, least_majorant, majorant_setup, theta_curve
from .report import Report
from .sampling import random_schur, random_schur_params
from .schur import j_forward, j_inverse, reconstruct_theta

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message)
        self.report = report


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = RunConfig()
    common.add_argument("--n", type=int, default=d.n, help="number of variables (self-test only; files carry their own)")
    common.add_argument("--m", type=int, default=d.m, help="Fock truncation degree")
    common.add_argument("--grid", type=_grid, default=d.r_grid, help="radii in [0,1], comma separated")
    common.add_argument("--tol-eig", type=float, default=d.tol_eig)
    common.add_argument("--tol-res", type=float, default=d.tol_residual)
    common.add_argument("--seed", type=int, default=d.seed)
    common.add_argument("--trials", type=int, default=d.trials)
    common.add_argument("--out", type=Path, default=None, help="write JSON here instead of stdout")

    p = argparse.ArgumentParser(prog="ncball", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("majorant", parents=[common], help="least majorant, defect residuals, sub-pluriharmonicity")
    s.add_argument("theta", type=Path)
    s = sub.add_parser("lift", parents=[common], help="solve a lifting problem")
    s.add_argument("data", type=Path)
    s.add_argument("--param", default="zero", help="zero, random, or a FreeSeries JSON file")
    s = sub.add_parser("dilate", parents=[common], help="minimal isometric dilation of a row contraction")
    s.add_argument("data", type=Path, help='JSON with a "T" list of matrices')
    s = sub.add_parser("schur-roundtrip", parents=[common], help="column <-> parameter round trips")
    s.add_argument("theta", type=Path)
    s.add_argument("--param", default="random", help='zero, random, or a JSON file {"phi": [FreeSeries, ...]}')
    sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    return p


def config_from_args(args) -> RunConfig:
    try:
        thread_cap()
        return RunConfig(args.n, args.m, args.grid, args.tol_eig, args.tol_res, args.seed, args.trials)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_json(path: Path):
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _parse(path: Path, parse):
    raw = _load_json(path)
    try:
        return parse(raw)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"{path} does not parse: {exc}") from None


def _rng(cfg: RunConfig, trial: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, trial])


def _pool_map(fn, items):
    with ThreadPoolExecutor(max_workers=thread_cap()) as pool:
        return list(pool.map(fn, items))


# commands

def cmd_majorant(args, cfg: RunConfig):
    theta = _parse(args.theta, FreeSeries.from_dict)
    cfg = replace(cfg, n=theta.n)
    basis = FockBasis(theta.n, cfg.m)
    if theta.degree >= cfg.m:
        raise ValidationFailure(f"degree {theta.degree} needs --m of at least {theta.degree + 1}")
    if h2_norm(theta) > 1.0 + cfg.tol_residual:
        raise ValidationFailure(f"h2 norm {h2_norm(theta):.6g} exceeds 1")
    W = least_majorant(theta, basis)
    rep = Report("majorant")
    residuals = []
    for r in cfg.r_grid:
        res = defect_residual(theta, r, basis)
        residuals.append({"r": r, "residual": res})
        rep.residual(f"defect r={r:g}", res, cfg.tol_residual)
    rep.extend(is_subpluriharmonic(theta_curve(theta), cfg.r_grid, None, basis, cfg.tol_eig), "sub.")
    return {"config": cfg.to_dict(), "W": W.to_dict(), "defect_residuals": residuals,
            "report": rep.to_dict(), "pass": rep.passed}, rep


def _param_choice(text: str):
    return text if text in ("zero", "random") else Path(text)


def cmd_lift(args, cfg: RunConfig):
    data = _parse(args.data, LiftingData.from_dict)
    param = _param_choice(args.param)
    fixed = _parse(param, FreeSeries.from_dict) if isinstance(param, Path) else None
    check = validate_data(data)
    if not check.passed:
        raise ValidationFailure("lifting data violates " + ", ".join(c.name for c in check.failures()), check)
    basis = FockBasis(data.n, cfg.m)
    omega = build_omega(data)
    o = omega.star_defect().rank
    if fixed is not None and (fixed.n != data.n or fixed.shape != (o, omega.gdim)):
        raise ValidationFailure(f"parameter must be an n={data.n} series of shape {(o, omega.gdim)}, "
                                f"got n={fixed.n} and {fixed.shape}")
    trials = cfg.trials if param == "random" else 1

    def one(trial: int):
        if param == "random":
            psi1 = random_schur(_rng(cfg, trial), basis, o, omega.gdim)
        elif fixed is not None:
            psi1 = fixed
        else:
            psi1 = None
        return solve_gncl(data, psi1, basis, tol_res=cfg.tol_residual)

    sols = _pool_map(one, range(trials))
    rep = Report("lift")
    for t, sol in enumerate(sols):
        rep.extend(sol.report, f"trial{t}." if trials > 1 else "")
    return {"config": cfg.to_dict(), "solutions": [s.to_dict() for s in sols], "pass": rep.passed}, rep


def cmd_dilate(args, cfg: RunConfig):
    T = _parse(args.data, lambda d: [matrix_from_dict(x) for x in d["T"]])
    if not T:
        raise UsageError("empty tuple")
    basis = FockBasis(len(T), cfg.m)
    try:
        dil = minimal_isometric_dilation(T, basis)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from None
    rep = dilation_report(dil)
    out = {"config": replace(cfg, n=len(T)).to_dict(), "dim_H": dil.hdim, "dim_D": dil.ddim,
           "dim_K": dil.kdim, "report": rep.to_dict(), "pass": rep.passed}
    return out, rep


def cmd_schur_roundtrip(args, cfg: RunConfig):
    theta = _parse(args.theta, FreeSeries.from_dict)
    param = _param_choice(args.param)
    fixed = None
    if isinstance(param, Path):
        fixed = _parse(param, lambda d: [FreeSeries.from_dict(x) for x in d["phi"]])
    cfg = replace(cfg, n=theta.n)
    basis = FockBasis(theta.n, cfg.m)
    if theta.degree > cfg.m:
        raise ValidationFailure(f"degree {theta.degree} exceeds --m {cfg.m}")
    if h2_norm(theta) > 1.0 + cfg.tol_residual:
        raise ValidationFailure(f"h2 norm {h2_norm(theta):.6g} exceeds 1")
    k = majorant_setup(theta, basis).k
    trials = cfg.trials if param == "random" else 1
    upto = basis.m - 1

    def one(trial: int):
        if param == "random":
            phi = random_schur_params(_rng(cfg, trial), basis, k)
        elif fixed is not None:
            phi = fixed
        else:
            phi = [FreeSeries.zero(basis.n, basis.m, k, k) for _ in range(basis.n)]
        try:
            col = j_forward(theta, phi, basis)
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from None
        back = j_inverse(theta, col, basis)
        return {
            "column": col.to_dict(),
            "theta_reproduced": reconstruct_theta(col, basis).max_coeff_diff(theta),
            "parameter_round_trip": max((a.max_coeff_diff(b, upto) for a, b in zip(back, phi)), default=0.0),
            "column_round_trip": j_forward(theta, back, basis).max_coeff_diff(col, upto),
        }

    results = _pool_map(one, range(trials))
    rep = Report("schur-roundtrip")
    for t, r in enumerate(results):
        for key in ("theta_reproduced", "parameter_round_trip", "column_round_trip"):
            rep.residual(f"trial{t}.{key}", r[key], cfg.tol_residual)
    return {"config": cfg.to_dict(), "trials": results, "pass": rep.passed}, rep


def cmd_selftest(args, cfg: RunConfig):
    results = acceptance.run_all(cfg, thread_cap())
    rep = Report("selftest")
    rows = []
    for c, r, dt in results:
        rep.flag(f"{c.number:02d} {c.name}", r.passed)
        rows.append({"number": c.number, "name": c.name, "pass": r.passed, "report": r.to_dict()})
        print(acceptance.summary_line(c, r) + f"  [{dt:.2f}s]", file=sys.stderr)
    return {"config": cfg.to_dict(), "criteria": rows, "pass": rep.passed}, rep


COMMANDS = {
    "majorant": cmd_majorant,
    "lift": cmd_lift,
    "dilate": cmd_dilate,
    "schur-roundtrip": cmd_schur_roundtrip,
    "selftest": cmd_selftest,
}


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on usage errors
    try:
        cfg = config_from_args(args)
        payload, rep = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"ncball: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationFailure, InvalidData) as exc:
        report = getattr(exc, "report", None)
        print(f"ncball: invalid input: {exc}", file=sys.stderr)
        if report is not None:
            print(report.table(), file=sys.stderr)
        _emit({"error": str(exc), "pass": False,
               "report": report.to_dict() if report is not None else None}, args.out)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, TruncationError, FloatingPointError, ValueError) as exc:
        print(f"ncball: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(payload, args.out)
    if args.command != "selftest":
        print(rep.table(), file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
