"""EZB: invert the average number of empty slots across frames."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import Saturated
from .planner import FRAME_GAP
from .sim import Population, ReplyModel, derive_seed, run_frame, tally
from .stats import ChannelModel


@dataclass(frozen=True)
class EzbConfig:
    f: int
    p: float
    n: int

    def __post_init__(self):
        if self.f < 1 or not (0 < self.p <= 1) or self.n < 1:
            raise ValueError(f"invalid EZB configuration {self}")

    @property
    def slots(self) -> float:
        return (self.f + FRAME_GAP) * self.n


def invert_empty_mean(mean_empty: float, f: int, p: float) -> float:
    """Population whose expected empty count per frame is ``mean_empty``.

    The mean is clamped to [0.5, f - 0.5] unless it equals f exactly, in
    which case the population is empty.
    """
    if mean_empty >= f:
        return 0.0
    clamped = min(max(mean_empty, 0.5), f - 0.5)
    return math.log(clamped / f) / math.log1p(-p / f)


def ezb_estimate(
    pop: Population,
    cfg: EzbConfig,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    seed: int = 0,
) -> float:
    empties = [
        tally(run_frame(pop, cfg.f, cfg.p, reply, ChannelModel.ZERO_ONE, derive_seed(seed, j))).n0
        for j in range(cfg.n)
    ]
    mean_empty = sum(empties) / cfg.n
    t_hat = invert_empty_mean(mean_empty, cfg.f, cfg.p)
    if mean_empty == 0:
        raise Saturated(
            "every slot of every EZB frame was busy",
            {"mean_empty": 0.0, "clamped_estimate": t_hat, "f": cfg.f, "p": cfg.p, "n": cfg.n},
        )
    return t_hat
