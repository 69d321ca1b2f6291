"""Reliability of a fixed plan when the true population sits below t_m.

Plans for t_m, then plays the planned frames at t = t_m / ratio for a
range of ratios and reports the empirical hit rate. Shows why {0,1,e}
breaks down at ratio 2: the true load falls near the dip, where the
expectation curve is too flat to resolve +/- beta * t.

    python scripts/planner_consistency.py --tm 2000 --trials 400
"""

import argparse

from gean.planner import AccuracySpec, plan
from gean.sim import ReplyModel, z_samples
from gean.stats import ChannelModel, LoadPoint, expected_z, invert_expected_z


def hit_rate(fp, t, beta, trials, seed):
    z = z_samples(t, fp.f_op, fp.p_op, ReplyModel.INDEPENDENT, fp.model, trials * fp.n_op, seed)
    hits = 0
    for zb in z.reshape(trials, fp.n_op).mean(axis=1):
        try:
            t_hat = invert_expected_z(float(zb), fp.p_op, fp.f_op, fp.model)
        except ValueError:
            continue
        hits += abs(t_hat - t) <= beta * t
    return hits / trials


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tm", type=float, default=2000)
    ap.add_argument("--alpha", type=float, default=0.95)
    ap.add_argument("--beta", type=float, default=0.05)
    ap.add_argument("--trials", type=int, default=400)
    args = ap.parse_args()
    spec = AccuracySpec(args.alpha, args.beta)

    for model in ChannelModel:
        fp = plan(spec, args.tm, model)
        print(f"{model.value}: r={fp.r_op:.4f} f={fp.f_op} p={fp.p_op:.4f} n={fp.n_op}")
        for ratio in (1.0, 1.2, 1.37, 1.6, 2.0):
            t = round(args.tm / ratio)
            lo = expected_z(LoadPoint((1 - args.beta) * t, fp.p_op, fp.f_op), model)
            hi = expected_z(LoadPoint((1 + args.beta) * t, fp.p_op, fp.f_op), model)
            rate = hit_rate(fp, t, args.beta, args.trials, seed=int(1000 * ratio))
            print(f"  t = t_m/{ratio:<4g} load {t * fp.p_op / fp.f_op:.3f}  "
                  f"Z window {hi - lo:.5f}  reliability {rate:.4f}")


if __name__ == "__main__":
    main()
