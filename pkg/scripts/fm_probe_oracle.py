"""Monte Carlo histogram of the averaged probe bound t_m / t.

Prints the exact law of the probe index at t, then the distribution of
the 100-round mean over independent repetitions and the fraction that
lands in [t, 2t]. The acceptance threshold for that fraction was read
off this output.

    python scripts/fm_probe_oracle.py --t 1000 --reps 200
"""

import argparse

import numpy as np

from gean.probe import FM_SCALE, upper_bound
from gean.sim import Population, derive_seed


def index_pmf(t, j_max=48):
    pmf, alive = {}, 1.0
    for j in range(1, j_max + 1):
        empty = (1 - 2.0 ** -(j - 1)) ** t
        pmf[j] = alive * empty
        alive *= 1 - empty
    return pmf


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=1000)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--rounds", type=int, default=100)
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()

    pmf = index_pmf(args.t)
    mean = sum(p * FM_SCALE * 2.0 ** (j - 2) for j, p in pmf.items())
    print(f"exact law of j at t={args.t}:")
    for j, p in pmf.items():
        if p > 1e-4:
            print(f"  j={j:2d}  {p:.4f}  {'#' * int(200 * p)}")
    print(f"exact E[sample] / t = {mean / args.t:.4f}")

    vals = np.array([
        upper_bound(Population(args.t, seed=r), args.rounds, seed=derive_seed(args.seed, args.t, r))
        for r in range(args.reps)
    ]) / args.t
    counts, edges = np.histogram(vals, bins=np.arange(0.8, 2.05, 0.05))
    print(f"\n{args.rounds}-round mean of t_m / t over {args.reps} repetitions:")
    for c, lo in zip(counts, edges):
        print(f"  {lo:4.2f}  {c:4d}  {'#' * c}")
    print(f"mean {vals.mean():.4f}  sd {vals.std(ddof=1):.4f}  min {vals.min():.4f}  max {vals.max():.4f}")
    print(f"fraction in [t, 2t]: {np.mean((vals >= 1) & (vals <= 2)):.4f}")


if __name__ == "__main__":
    main()
