"""Measure how fast alpha + beta (and the L1 distance to the fixed point) decay.

The fixed point is nonhyperbolic, so convergence is algebraic rather than
geometric. Fits a power law to several long float orbits and prints one line
per start.

    python scripts/decay_rate.py --steps 100000
"""
import argparse

import numpy as np

from gonosomal.analysis import estimate_decay_exponent, fit_power_law, iterate
from gonosomal.core import Arith, fixed_point, parse_state
from gonosomal.operators import hemophilia_operator

STARTS = ["0,1/2,1/2,0", "0.1,0.2,0.3,0.4", "0.05,0.45,0.05,0.45", "0.4,0.1,0.1,0.4"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20_000)
    args = ap.parse_args()

    op = hemophilia_operator()
    target = fixed_point(Arith.FLOAT)
    print(f"{'start':24s} {'p(alpha+beta)':>14s} {'p(L1 dist)':>11s} {'drift':>9s} {'m*dist':>8s}")
    for text in STARTS:
        traj = iterate(op, parse_state(text, Arith.FLOAT), args.steps)
        fit = estimate_decay_exponent(traj)
        dist = np.array([float(d) for d in traj.distances(target)[1:]])
        dfit = fit_power_law(dist)
        # for an exponent of one, m * dist settles to a constant
        print(f"{text:24s} {fit.exponent:14.4f} {dfit.exponent:11.4f} {fit.drift:9.2e} {len(dist) * dist[-1]:8.3f}")


if __name__ == "__main__":
    main()
