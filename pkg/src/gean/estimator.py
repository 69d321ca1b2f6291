"""End-to-end GEAN run: probe, plan, play the frames, invert the mean Z."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRange, Saturated
from .planner import FRAME_GAP, AccuracySpec, FramePlan, PlannerConfig, min_estimable_upper_bound, plan
from .probe import run_probe
from .sim import Population, ReplyModel, derive_seed, run_frame, tally, z_statistic
from .stats import ChannelModel, dip_location, invert_expected_z

PROBE_ROUNDS = 100

# stream labels fed to derive_seed
_PROBE_STREAM = 0
_FRAME_STREAM = 1


@dataclass(frozen=True)
class EstimateReport:
    t_hat: float
    plan: FramePlan
    z_values: tuple[float, ...]
    z_bar: float
    slots_estimation: float
    slots_probe: float
    model: ChannelModel
    t_m_probed: float = math.nan

    def describe(self) -> str:
        p = self.plan
        return "\n".join(
            [
                f"model            {self.model.value}",
                f"probed t_m       {self.t_m_probed:.2f} (planned against {p.t_m:g})",
                f"operating point  r={p.r_op:.4f} f={p.f_op} p={p.p_op:.5f} n={p.n_op} eps={p.eps_op:.4f}",
                f"mean Z           {self.z_bar:.6f}",
                f"estimate         {self.t_hat:.2f}",
                f"slots            {self.slots_estimation:.2f} estimation + {self.slots_probe:g} probe",
            ]
        )


def planning_bound(probed: float, spec: AccuracySpec, model: ChannelModel) -> int:
    """Integer upper bound handed to the planner.

    Under {0,1} the bound is raised to the smallest value the planner can
    serve; a larger upper bound is still an upper bound. {0,1,e} is left
    alone and may come back Infeasible.
    """
    t_m = math.ceil(max(probed, 1.0))
    if model is ChannelModel.ZERO_ONE:
        t_m = max(t_m, math.ceil(min_estimable_upper_bound(spec, model)))
    return t_m


def estimate(
    spec: AccuracySpec,
    pop: Population,
    model: ChannelModel,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    seed: int = 0,
    *,
    compensate: bool = True,
    probe_rounds: int = PROBE_ROUNDS,
    config: PlannerConfig = PlannerConfig(),
) -> EstimateReport:
    probe = run_probe(pop, probe_rounds, reply, derive_seed(seed, _PROBE_STREAM))
    fp = plan(spec, planning_bound(probe.t_m, spec, model), model, config, compensate)

    z_values = tuple(z_statistic(tally(seq), model) for seq in _frames(pop, fp, reply, seed))
    # fsum is exactly rounded, so the mean does not depend on frame order
    z_bar = math.fsum(z_values) / len(z_values)

    try:
        t_hat = invert_expected_z(z_bar, fp.p_op, fp.f_op, model)
    except OutOfRange as exc:
        if model is ChannelModel.ZERO_ONE_E and z_bar < 0:
            # below the dip floor: nearest admissible root is the dip itself
            t_hat = dip_location(fp.p_op, fp.f_op)
        else:
            raise Saturated(
                str(exc),
                {"z_bar": z_bar, "f_op": fp.f_op, "p_op": fp.p_op, "n_op": fp.n_op, "t_m": fp.t_m},
            ) from exc

    return EstimateReport(
        t_hat=t_hat,
        plan=fp,
        z_values=z_values,
        z_bar=z_bar,
        slots_estimation=(fp.f_op + FRAME_GAP) * fp.n_op,
        slots_probe=float(probe.slots),
        model=model,
        t_m_probed=probe.t_m,
    )


def _frames(pop, fp: FramePlan, reply, seed):
    for j in range(fp.n_op):
        yield run_frame(pop, fp.f_op, fp.p_op, reply, fp.model, derive_seed(seed, _FRAME_STREAM, j))


def replay_frames(report: EstimateReport, pop: Population, reply: ReplyModel, seed: int):
    """Regenerate the reader sequences behind ``report`` (same seeds, same frames)."""
    return list(_frames(pop, report.plan, reply, seed))


def slots_used(report: EstimateReport, include_probe: bool = False) -> float:
    return report.slots_estimation + (report.slots_probe if include_probe else 0.0)

