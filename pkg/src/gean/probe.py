"""Flajolet-Martin style upper bound on the population size.

One-slot frames are issued with persistence 1, 1/2, 1/4, ... until a frame
comes back empty; the index j of that frame gives 1.2897 * 2**(j - 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProbeOverflow
from .sim import Population, ReplyModel, derive_seed, frame_rng, occupancy

FM_SCALE = 1.2897
MAX_FRAMES = 64


@dataclass(frozen=True)
class ProbeResult:
    j: int
    t_m_sample: float
    t_m: float


@dataclass(frozen=True)
class ProbeRun:
    samples: tuple[ProbeResult, ...]
    t_m: float
    slots: int


def sample_from_index(j: int) -> float:
    return FM_SCALE * 2.0 ** (j - 2)


def probe_once(
    pop: Population,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    round_seed: int = 0,
) -> ProbeResult:
    rng = frame_rng(pop.seed, round_seed)
    for i in range(1, MAX_FRAMES + 1):
        p = 0.5 ** (i - 1)
        if occupancy(pop.t, 1, p, reply, rng)[0] == 0:
            s = sample_from_index(i)
            return ProbeResult(j=i, t_m_sample=s, t_m=s)
    raise ProbeOverflow(f"no empty slot within {MAX_FRAMES} probe frames (t={pop.t})")


def run_probe(
    pop: Population,
    rounds: int = 100,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    seed: int = 0,
) -> ProbeRun:
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    samples = tuple(probe_once(pop, reply, derive_seed(seed, i)) for i in range(rounds))
    mean = float(np.mean([s.t_m_sample for s in samples]))
    return ProbeRun(samples=samples, t_m=mean, slots=sum(s.j for s in samples))


def upper_bound(
    pop: Population,
    rounds: int = 100,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    seed: int = 0,
) -> float:
    """Mean of ``rounds`` independent probe samples."""
    return run_probe(pop, rounds, reply, seed).t_m
