"""Monte Carlo campaigns over (scheme, model, t) grids, with CSV and SVG output."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .baselines import invert_empty_mean
from .errors import GeanError
from .estimator import PROBE_ROUNDS, estimate
from .planner import FRAME_GAP, AccuracySpec, min_estimable_upper_bound
from .probe import run_probe
from .sim import Population, ReplyModel, derive_seed, run_frame, tally
from .stats import ChannelModel

SCHEMES = ("GEAN", "GEAN-WAEC", "EZB")
DEFAULT_T_VALUES = (100, 316, 1000, 3162, 10000, 31623, 100000)
CSV_HEADER = (
    "scheme",
    "model",
    "t",
    "alpha",
    "beta",
    "trials",
    "achieved_reliability",
    "mean_slots",
    "std_slots",
    "mean_t_hat",
    "mean_probe_slots",
    "reason",
)

# EZB sweep: frame size relative to t_m / 1.594 (load minimising its variance), and round counts
EZB_LOAD = 1.594
EZB_FRAME_SCALES = (0.5, 1.0, 2.0)
EZB_ROUNDS = (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)

BAND_SAMPLE = 50
BAND_RESAMPLES = 200


@dataclass(frozen=True)
class CampaignConfig:
    schemes: tuple[str, ...] = ("GEAN",)
    models: tuple[ChannelModel, ...] = (ChannelModel.ZERO_ONE,)
    t_values: tuple[int, ...] = DEFAULT_T_VALUES
    alpha: float = 0.95
    beta: float = 0.05
    trials: int = 50
    master_seed: int = 0
    include_probe_cost: bool = False
    output_dir: Path = Path("results")
    reply: ReplyModel = ReplyModel.INDEPENDENT
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.t_values:
            raise ValueError("t_values must not be empty")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes {sorted(unknown)}")
        AccuracySpec(self.alpha, self.beta)

    @property
    def spec(self) -> AccuracySpec:
        return AccuracySpec(self.alpha, self.beta)


@dataclass(frozen=True)
class CampaignRow:
    scheme: str
    model: str
    t: int
    alpha: float
    beta: float
    trials: int
    achieved_reliability: float | None = None
    mean_slots: float | None = None
    std_slots: float | None = None
    mean_t_hat: float | None = None
    mean_probe_slots: float | None = None
    reason: str = ""

    def __post_init__(self):
        # reason is a one-line note; NUL and bare CR do not survive the csv module
        if any(c in self.reason for c in "\x00\r\n"):
            raise ValueError(f"reason must be a single line without NUL, got {self.reason!r}")


@dataclass
class _Trials:
    hits: int = 0
    slots: list = field(default_factory=list)
    t_hats: list = field(default_factory=list)
    probe_slots: list = field(default_factory=list)


def trial_seed(master_seed: int, model: ChannelModel, t: int, trial: int) -> int:
    # the scheme is left out on purpose: schemes in one cell share populations and probes
    return derive_seed(master_seed, 1 if model is ChannelModel.ZERO_ONE_E else 0, t, trial)


def band_std(values: Sequence[float], seed: int) -> float:
    """Spread of the slot cost; a 50-sample bootstrap figure once there are enough trials."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        return 0.0
    if x.size < BAND_SAMPLE:
        return float(np.std(x, ddof=1))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x50]))
    draws = rng.choice(x, size=(BAND_RESAMPLES, BAND_SAMPLE), replace=True)
    return float(np.mean(np.std(draws, axis=1, ddof=1)))


def _summarise(scheme, model, t, cfg, acc: _Trials, seed, reason="") -> CampaignRow:
    n_ok = len(acc.slots)
    return CampaignRow(
        scheme=scheme,
        model=model.value,
        t=t,
        alpha=cfg.alpha,
        beta=cfg.beta,
        trials=cfg.trials,
        achieved_reliability=acc.hits / cfg.trials,
        mean_slots=float(np.mean(acc.slots)) if n_ok else None,
        std_slots=band_std(acc.slots, seed) if n_ok else None,
        mean_t_hat=float(np.mean(acc.t_hats)) if acc.t_hats else None,
        mean_probe_slots=float(np.mean(acc.probe_slots)) if acc.probe_slots else None,
        reason=reason,
    )


def _gean_cell(scheme, model, t, cfg: CampaignConfig) -> CampaignRow:
    spec = cfg.spec
    if model is ChannelModel.ZERO_ONE_E:
        t_ml = min_estimable_upper_bound(spec, model)
        if t < t_ml:
            return CampaignRow(scheme, model.value, t, cfg.alpha, cfg.beta, cfg.trials,
                               reason=f"infeasible: t below t_ml={t_ml:.1f}")
    acc = _Trials()
    failures = {}
    for i in range(cfg.trials):
        seed = trial_seed(cfg.master_seed, model, t, i)
        try:
            rep = estimate(spec, Population(t, seed), model, cfg.reply, seed,
                           compensate=(scheme == "GEAN"))
        except GeanError as exc:
            name = type(exc).__name__
            failures[name] = failures.get(name, 0) + 1
            continue
        acc.hits += abs(rep.t_hat - t) <= cfg.beta * t
        acc.slots.append(rep.slots_estimation + (rep.slots_probe if cfg.include_probe_cost else 0.0))
        acc.t_hats.append(rep.t_hat)
        acc.probe_slots.append(rep.slots_probe)
    reason = "; ".join(f"{k} x{v}" for k, v in sorted(failures.items()))
    if not acc.slots:
        return CampaignRow(scheme, model.value, t, cfg.alpha, cfg.beta, cfg.trials,
                           reason=f"infeasible: {reason}")
    return _summarise(scheme, model, t, cfg, acc, derive_seed(cfg.master_seed, t, 7), reason)


def _ezb_cell(model, t, cfg: CampaignConfig) -> CampaignRow:
    """Cheapest swept EZB configuration that empirically meets alpha."""
    n_max = max(EZB_ROUNDS)
    grid = {(s, n): _Trials() for s in EZB_FRAME_SCALES for n in EZB_ROUNDS}
    for i in range(cfg.trials):
        seed = trial_seed(cfg.master_seed, model, t, i)
        pop = Population(t, seed)
        probe = run_probe(pop, PROBE_ROUNDS, cfg.reply, derive_seed(seed, 0))
        t_m = math.ceil(max(probe.t_m, 1.0))
        for s in EZB_FRAME_SCALES:
            f = max(1, round(s * t_m / EZB_LOAD))
            empties = np.cumsum([
                tally(run_frame(pop, f, 1.0, cfg.reply, ChannelModel.ZERO_ONE,
                                derive_seed(seed, 2, j))).n0
                for j in range(n_max)
            ])
            for n in EZB_ROUNDS:
                t_hat = invert_empty_mean(empties[n - 1] / n, f, 1.0)
                acc = grid[(s, n)]
                acc.hits += abs(t_hat - t) <= cfg.beta * t
                acc.slots.append((f + FRAME_GAP) * n + (probe.slots if cfg.include_probe_cost else 0.0))
                acc.t_hats.append(t_hat)
                acc.probe_slots.append(probe.slots)

    def cost(key):
        return float(np.mean(grid[key].slots))

    meeting = [k for k, a in grid.items() if a.hits / cfg.trials >= cfg.alpha]
    if meeting:
        best, reason = min(meeting, key=lambda k: (cost(k), k)), ""
    else:
        best = max(grid, key=lambda k: (grid[k].hits, -cost(k)))
        reason = "no swept EZB configuration met alpha"
    return _summarise("EZB", model, t, cfg, grid[best], derive_seed(cfg.master_seed, t, 8), reason)


def _run_cell(args) -> CampaignRow:
    scheme, model, t, cfg = args
    if scheme == "EZB":
        return _ezb_cell(model, t, cfg)
    return _gean_cell(scheme, model, t, cfg)


def run_campaign(cfg: CampaignConfig) -> list[CampaignRow]:
    cells = [(s, m, t, cfg) for s in cfg.schemes for m in cfg.models for t in cfg.t_values]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_run_cell, cells))
    return [_run_cell(c) for c in cells]


def is_infeasible(row: CampaignRow) -> bool:
    return row.achieved_reliability is None


# --- CSV ---------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if not math.isfinite(value):
            return ""
        return repr(value)
    return str(value)


def rows_to_csv(rows: Iterable[CampaignRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow([_fmt(getattr(row, name)) for name in CSV_HEADER])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[CampaignRow]:
    reader = csv.DictReader(io.StringIO(text, newline=""))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    kinds = {f.name: f.type for f in fields(CampaignRow)}
    out = []
    for rec in reader:
        vals = {}
        for name, raw in rec.items():
            kind = str(kinds[name])
            if name in ("scheme", "model", "reason"):
                vals[name] = raw
            elif kind == "int":
                vals[name] = int(raw)
            elif raw == "":
                vals[name] = None
            else:
                vals[name] = float(raw)
        out.append(CampaignRow(**vals))
    return out


def read_results(path) -> list[CampaignRow]:
    return rows_from_csv(Path(path).read_text())


# --- charts -------------------------------------------------------------------


_MODEL_LABELS = {"zo": "{0,1}", "zoe": "{0,1,e}"}


def _series(rows, value):
    groups: dict[tuple[str, str], list[CampaignRow]] = {}
    for row in rows:
        groups.setdefault((row.scheme, row.model), []).append(row)
    for (scheme, model), members in groups.items():
        members = sorted((r for r in members if getattr(r, value) is not None), key=lambda r: r.t)
        if members:
            yield f"{scheme} {_MODEL_LABELS.get(model, model)}", members


def _save_svg(fig, path: Path):
    import matplotlib

    with matplotlib.rc_context({"svg.hashsalt": "gean", "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})


def write_charts(rows: Sequence[CampaignRow], cfg: CampaignConfig, out: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = []
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, members in _series(rows, "achieved_reliability"):
        ax.plot([r.t for r in members], [r.achieved_reliability for r in members], marker="o", label=label)
    ax.axhline(cfg.alpha, color="grey", linestyle="--", linewidth=1, label=f"alpha = {cfg.alpha:g}")
    ax.set_xscale("log")
    ax.set_xlabel("population size t")
    ax.set_ylabel("achieved reliability")
    ax.set_title(f"Reliability, alpha={cfg.alpha:g}, beta={cfg.beta:g}")
    ax.legend(fontsize="small")
    fig.tight_layout()
    paths.append(out / "reliability.svg")
    _save_svg(fig, paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for label, members in _series(rows, "mean_slots"):
        t = np.array([r.t for r in members], dtype=float)
        mean = np.array([r.mean_slots for r in members])
        sd = np.array([r.std_slots or 0.0 for r in members])
        (line,) = ax.plot(t, mean, marker="o", label=label)
        ax.fill_between(t, mean - sd, mean + sd, color=line.get_color(), alpha=0.15, linewidth=0)
    ax.set_xscale("log")
    ax.set_xlabel("population size t")
    ax.set_ylabel("slots, (f + l) x n")
    ax.set_title(f"Slot cost, alpha={cfg.alpha:g}, beta={cfg.beta:g}")
    if ax.get_legend_handles_labels()[0]:  # all-infeasible runs have no series
        ax.legend(fontsize="small")
    fig.tight_layout()
    paths.append(out / "slots.svg")
    _save_svg(fig, paths[-1])
    plt.close(fig)
    return paths


def write_outputs(rows: Sequence[CampaignRow], cfg: CampaignConfig) -> list[Path]:
    if not rows:
        raise ValueError("no rows to write")
    out = Path(cfg.output_dir)
    try:
        os.makedirs(out, exist_ok=True)
        csv_path = out / "results.csv"
        csv_path.write_text(rows_to_csv(rows))
        return [csv_path, *write_charts(rows, cfg, out)]
    except OSError as exc:
        raise OSError(f"could not write campaign outputs under {out}: {exc}") from exc
