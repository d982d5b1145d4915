"""Norm estimate and defect residual of random Schur polynomials as the truncation degree grows.

The nilpotent norm estimate is a lower bound for the sup norm and should
increase with m; the defect residual should stay at round-off.

    python3 scripts/truncation_sweep.py --n 2 --m-max 6 --samples 5
"""

import argparse
import csv
import sys

import numpy as np

from ncball.fock import FockBasis
from ncball.freeseries import hinf_norm
from ncball.majorant import defect_residual
from ncball.sampling import random_theta


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m-max", type=int, default=6)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    thetas = [random_theta(rng, args.n, args.degree + 1, 1, 1, args.degree) for _ in range(args.samples)]
    out = csv.writer(sys.stdout)
    out.writerow(["sample", "m", "fock_dim", "hinf_estimate", "defect_residual_r0.9"])
    for m in range(args.degree + 1, args.m_max + 1):
        basis = FockBasis(args.n, m)
        for i, th in enumerate(thetas):
            th = th.with_cap(m)
            out.writerow([i, m, basis.dim, f"{hinf_norm(th, basis):.12f}",
                          f"{defect_residual(th, 0.9, basis):.3e}"])


if __name__ == "__main__":
    main()
