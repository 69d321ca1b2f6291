"""Command line: ``gean {plan,probe,estimate,campaign}``.

Options may also come from a ``--config`` file of ``key = value`` lines using
the long flag names (``tm = 2400``, ``model = zoe``); flags win over the file.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .campaign import (
    DEFAULT_T_VALUES,
    SCHEMES,
    CampaignConfig,
    CampaignRow,
    is_infeasible,
    rows_to_csv,
    run_campaign,
    write_outputs,
)
from .errors import GeanError, Infeasible
from .estimator import estimate, replay_frames, slots_used
from .planner import AccuracySpec, plan
from .probe import run_probe
from .sim import Population, ReplyModel, write_trace
from .stats import ChannelModel

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

_DEFAULTS = {
    "alpha": 0.95,
    "beta": 0.05,
    "tm": None,
    "t": None,
    "model": "zo",
    "reply": "indep",
    "seed": 0,
    "trials": 50,
    "out": None,
    "rounds": 100,
    "schemes": "GEAN",
    "models": None,
    "t_values": None,
    "include_probe": False,
    "workers": 1,
    "trace": None,
}


def read_config(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().lstrip("-").replace("-", "_")
        if key not in _DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def _csv_list(v):
    if v is None:
        return None
    if isinstance(v, (list, tuple)):
        return list(v)
    return [x.strip() for x in str(v).split(",") if x.strip()]


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags, then coerce types."""
    opts = dict(_DEFAULTS)
    if args.config:
        opts.update(read_config(args.config))
    for key in _DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            opts[key] = val
    for key in ("alpha", "beta"):
        opts[key] = float(opts[key])
    for key in ("tm", "t"):
        if opts[key] is not None:
            opts[key] = float(opts[key]) if key == "tm" else int(float(opts[key]))
    for key in ("seed", "trials", "rounds", "workers"):
        opts[key] = int(opts[key])
    opts["include_probe"] = _bool(opts["include_probe"])
    opts["model"] = ChannelModel.parse(opts["model"])
    opts["reply"] = ReplyModel.parse(opts["reply"])
    return opts


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="file of 'key = value' lines mirroring the flags")
    p.add_argument("--alpha", type=float, help="required reliability")
    p.add_argument("--beta", type=float, help="relative confidence interval")
    p.add_argument("--model", choices=["zo", "zoe"], help="channel model {0,1} or {0,1,e}")
    p.add_argument("--reply", choices=["hash", "indep"], help="agent reply model")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gean", description="Active-node estimation over framed slotted Aloha.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="print the operating point for an upper bound")
    _add_common(p)
    p.add_argument("--tm", type=float, help="upper bound on the population")
    p.add_argument("--no-compensation", dest="waec", action="store_true",
                   help="size rounds for alpha instead of alpha + eps")

    p = sub.add_parser("probe", help="run the Flajolet-Martin probe on a simulated population")
    _add_common(p)
    p.add_argument("--t", type=int, help="true population size")
    p.add_argument("--rounds", type=int, help="probe rounds to average")

    p = sub.add_parser("estimate", help="one end-to-end estimate on a simulated population")
    _add_common(p)
    p.add_argument("--t", type=int, help="true population size")
    p.add_argument("--no-compensation", dest="waec", action="store_true")
    p.add_argument("--include-probe", dest="include_probe", action="store_true")
    p.add_argument("--trace", help="write frame_index,symbols lines to this file")

    p = sub.add_parser("campaign", help="Monte Carlo grid over schemes, models and populations")
    _add_common(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--t", type=int, help="single population size (shorthand for --t-values)")
    p.add_argument("--t-values", dest="t_values", help="comma separated population sizes")
    p.add_argument("--schemes", help=f"comma separated subset of {','.join(SCHEMES)}")
    p.add_argument("--models", help="comma separated subset of zo,zoe (default: --model)")
    p.add_argument("--include-probe", dest="include_probe", action="store_true")
    p.add_argument("--workers", type=int)
    return parser


def _need(opts, key, flag):
    if opts[key] is None:
        raise SystemExit(f"gean: {flag} is required (flag or config file)")
    return opts[key]


def cmd_plan(opts, args) -> int:
    spec = AccuracySpec(opts["alpha"], opts["beta"])
    fp = plan(spec, _need(opts, "tm", "--tm"), opts["model"], compensate=not args.waec)
    for key, value in asdict(fp).items():
        if key == "spec":
            continue
        print(f"{key:12s} {value.value if isinstance(value, ChannelModel) else value}")
    return EXIT_OK


def cmd_probe(opts, args) -> int:
    pop = Population(_need(opts, "t", "--t"), opts["seed"])
    run = run_probe(pop, opts["rounds"], opts["reply"], opts["seed"])
    print(f"t_m    {run.t_m:.4f}")
    print(f"rounds {len(run.samples)}")
    print(f"slots  {run.slots}")
    return EXIT_OK


def cmd_estimate(opts, args) -> int:
    t = _need(opts, "t", "--t")
    spec = AccuracySpec(opts["alpha"], opts["beta"])
    pop = Population(t, opts["seed"])
    rep = estimate(spec, pop, opts["model"], opts["reply"], opts["seed"], compensate=not args.waec)
    print(rep.describe())
    if opts["trace"]:
        with open(opts["trace"], "w") as fh:
            write_trace(replay_frames(rep, pop, opts["reply"], opts["seed"]), fh)
    if opts["out"]:
        slots = slots_used(rep, opts["include_probe"])
        row = CampaignRow(
            scheme="GEAN" if not args.waec else "GEAN-WAEC",
            model=rep.model.value,
            t=t,
            alpha=spec.alpha,
            beta=spec.beta,
            trials=1,
            achieved_reliability=float(abs(rep.t_hat - t) <= spec.beta * t),
            mean_slots=slots,
            std_slots=0.0,
            mean_t_hat=rep.t_hat,
            mean_probe_slots=rep.slots_probe,
        )
        out = Path(opts["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(rows_to_csv([row]))
    return EXIT_OK


def cmd_campaign(opts, args) -> int:
    t_values = _csv_list(opts["t_values"])
    if t_values is None:
        t_values = [opts["t"]] if opts["t"] is not None else list(DEFAULT_T_VALUES)
    models = _csv_list(opts["models"]) or [opts["model"]]
    cfg = CampaignConfig(
        schemes=tuple(_csv_list(opts["schemes"])),
        models=tuple(ChannelModel.parse(m) for m in models),
        t_values=tuple(int(float(t)) for t in t_values),
        alpha=opts["alpha"],
        beta=opts["beta"],
        trials=opts["trials"],
        master_seed=opts["seed"],
        include_probe_cost=opts["include_probe"],
        output_dir=Path(opts["out"] or "results"),
        reply=opts["reply"],
        workers=opts["workers"],
    )
    rows = run_campaign(cfg)
    for path in write_outputs(rows, cfg):
        print(path)
    if all(is_infeasible(r) for r in rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


COMMANDS = {"plan": cmd_plan, "probe": cmd_probe, "estimate": cmd_estimate, "campaign": cmd_campaign}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts, args)
    except Infeasible as exc:
        print(f"gean: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GeanError, ValueError, OSError) as exc:
        print(f"gean: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
