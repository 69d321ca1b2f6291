"""Reliability and slot-cost sweeps over population size, plus planned cost per channel model.

Runs one campaign per (alpha, beta) setting over the default log-spaced
population grid and writes results.csv, reliability.svg and slots.svg
under ``--out/<setting>``. A planned-cost table comparing the two
channel models is printed at the end.

    python scripts/reproduce_figures.py --trials 50 --out results
"""

import argparse
import time
from pathlib import Path

from gean.campaign import DEFAULT_T_VALUES, SCHEMES, CampaignConfig, run_campaign, write_outputs
from gean.errors import Infeasible
from gean.planner import AccuracySpec, plan
from gean.stats import ChannelModel

SETTINGS = [(0.95, 0.05), (0.9, 0.1)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    ap.add_argument("--schemes", default=",".join(SCHEMES))
    args = ap.parse_args()

    for alpha, beta in SETTINGS:
        cfg = CampaignConfig(
            schemes=tuple(args.schemes.split(",")),
            models=tuple(ChannelModel),
            t_values=DEFAULT_T_VALUES,
            alpha=alpha,
            beta=beta,
            trials=args.trials,
            master_seed=args.seed,
            output_dir=Path(args.out) / f"a{alpha:g}_b{beta:g}",
            workers=args.workers,
        )
        start = time.perf_counter()
        rows = run_campaign(cfg)
        write_outputs(rows, cfg)
        print(f"alpha={alpha:g} beta={beta:g}: {len(rows)} rows in {time.perf_counter() - start:.0f}s -> {cfg.output_dir}")
        for r in rows:
            rel = "-" if r.achieved_reliability is None else f"{r.achieved_reliability:.3f}"
            slots = "-" if r.mean_slots is None else f"{r.mean_slots:.1f}"
            print(f"  {r.scheme:9s} {r.model:3s} t={r.t:<6d} reliability {rel:>6s} slots {slots:>9s} {r.reason}")

    spec = AccuracySpec(0.95, 0.05)
    print("\nplanned total slots, alpha=0.95 beta=0.05")
    for t_m in (1000, 2000, 5000, 10**4, 10**5, 10**6):
        cells = []
        for model in ChannelModel:
            try:
                cells.append(f"{plan(spec, t_m, model).total_slots:10.2f}")
            except Infeasible:
                cells.append(f"{'infeasible':>10s}")
        print(f"  t_m={t_m:<8d} zo {cells[0]}  zoe {cells[1]}")


if __name__ == "__main__":
    main()
