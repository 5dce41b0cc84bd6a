"""Where do orbits of the unnormalized map go, as a function of the start's scale?

Starts are t * d for random directions d on the simplex. For each direction the
critical scale t* separating decay to the origin from blow-up is located by
bisection, and the verdict counts over a log-uniform grid of scales are printed.

    python scripts/unnormalized_dichotomy.py --directions 200
"""
import argparse

import numpy as np

from gonosomal.analysis import Verdict, classify_unnormalized_orbit
from gonosomal.core import RawState4


def verdict(direction, scale):
    return classify_unnormalized_orbit(RawState4(*(scale * direction))).verdict


def critical_scale(direction, lo=1e-3, hi=1e3, rounds=50):
    for _ in range(rounds):
        mid = np.sqrt(lo * hi)
        if verdict(direction, mid) is Verdict.ORIGIN:
            lo = mid
        else:
            hi = mid
    return np.sqrt(lo * hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--directions", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    counts = {v: 0 for v in Verdict}
    crit = []
    for _ in range(args.directions):
        d = rng.random(4) + 1e-3
        d /= d.sum()
        for scale in np.logspace(-2, 2, 21):
            counts[verdict(d, scale)] += 1
        crit.append(critical_scale(d))
    crit = np.array(crit)
    print("verdicts:", {v.value: n for v, n in counts.items()})
    print(f"critical scale t*: min {crit.min():.4f}  median {np.median(crit):.4f}  max {crit.max():.4f}")
    # along (1/2, 0, 1/2, 0) the scale maps as t -> t^2 / 4, so t = 4 is the unstable fixed scale
    print("reference: t* = 4 exactly for the direction (1/2, 0, 1/2, 0)")


if __name__ == "__main__":
    main()
