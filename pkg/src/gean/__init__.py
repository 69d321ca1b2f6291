"""Gaussian estimation of active nodes (GEAN) over framed slotted Aloha."""

from .errors import Degenerate, GeanError, Infeasible, InvalidUpperBound, OutOfRange, ProbeOverflow, Saturated
from .estimator import EstimateReport, estimate, slots_used
from .planner import AccuracySpec, FramePlan, PlannerConfig, plan
from .sim import Population, ReplyModel
from .stats import ChannelModel, LoadPoint

__all__ = [
    "AccuracySpec",
    "ChannelModel",
    "Degenerate",
    "EstimateReport",
    "FramePlan",
    "GeanError",
    "Infeasible",
    "InvalidUpperBound",
    "LoadPoint",
    "OutOfRange",
    "PlannerConfig",
    "Population",
    "ProbeOverflow",
    "ReplyModel",
    "Saturated",
    "estimate",
    "plan",
    "slots_used",
]
