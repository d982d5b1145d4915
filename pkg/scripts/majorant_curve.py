"""Per-radius margins of the sub-pluriharmonic and defect checks for one Theta.

Reads a FreeSeries JSON file (or draws a random one) and prints a CSV with,
for each radius r on the grid, the smallest eigenvalue of
P[Re Theta(gamma)] - Re Theta(r) for the largest gamma > r, and the defect residual.

    python3 scripts/majorant_curve.py --m 5 --points 20
    python3 scripts/majorant_curve.py theta.json --m 5
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from ncball.fock import FockBasis
from ncball.freeseries import FreeSeries
from ncball.linalg import min_eig
from ncball.majorant import defect_residual, theta_curve
from ncball.sampling import random_theta
from ncball.transforms import operator_poisson


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("theta", type=Path, nargs="?")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if args.theta is None:
        theta = random_theta(np.random.default_rng(args.seed), args.n, args.m, 1, 1, args.m - 2)
    else:
        theta = FreeSeries.from_dict(json.loads(args.theta.read_text()))
    basis = FockBasis(theta.n, args.m)
    curve = theta_curve(theta)
    top = curve(args.gamma, basis)

    out = csv.writer(sys.stdout)
    out.writerow(["r", "poisson_domination_min_eig", "defect_residual"])
    for r in np.linspace(0.0, args.gamma, args.points, endpoint=False):
        X = basis.creation_tuple(curve.side, r / args.gamma)
        gap = operator_poisson(top, X, basis, side=curve.side) - curve(r, basis)
        out.writerow([f"{r:.4f}", f"{min_eig(gap):.3e}", f"{defect_residual(theta, r, basis):.3e}"])


if __name__ == "__main__":
    main()
