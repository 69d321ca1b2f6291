"""Closed-form slot statistics of the GEAN estimator.

Everything here uses the exact binomial powers ``(1 - p/f)**t``; the
exponential shortcuts only appear in :mod:`gean.planner`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange

BISECT_TOL = 1e-6
BRACKET_CAP = 1e9


class ChannelModel(enum.Enum):
    """What the reader can tell apart in a slot."""

    ZERO_ONE = "zo"  # empty vs. non-empty
    ZERO_ONE_E = "zoe"  # empty vs. singleton vs. collision

    @classmethod
    def parse(cls, value: "str | ChannelModel") -> "ChannelModel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for junk in "-_{},":
            key = key.replace(junk, "")
        aliases = {
            "zo": cls.ZERO_ONE,
            "zeroone": cls.ZERO_ONE,
            "01": cls.ZERO_ONE,
            "zoe": cls.ZERO_ONE_E,
            "zeroonee": cls.ZERO_ONE_E,
            "01e": cls.ZERO_ONE_E,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown channel model {value!r}") from None


@dataclass(frozen=True)
class SlotProbs:
    p0: float
    p1: float
    pe: float
    pn: float


@dataclass(frozen=True)
class LoadPoint:
    """Population ``t`` answering a frame of ``f`` slots with persistence ``p``.

    ``t`` may be real-valued; the inversion routines evaluate the curves
    between integers.
    """

    t: float
    p: float
    f: int

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError(f"t must be finite and >= 0, got {self.t}")
        if not (0 < self.p <= 1):
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.f < 1:
            raise ValueError(f"f must be >= 1, got {self.f}")

    @property
    def r(self) -> float:
        return self.t * self.p / self.f


def _empty_and_single(t, x):
    """Return (p0, p1) for t agents each hitting a slot with probability x.

    Works elementwise on arrays. ``x == 1`` is handled explicitly since
    ``0 ** (t - 1)`` blows up at t = 0.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    q = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        log_q = np.log1p(-x)
        p0 = np.exp(t * log_q)
        p1 = t * x * np.exp((t - 1.0) * log_q)
    p0 = np.where(q == 0, np.where(t == 0, 1.0, 0.0), p0)
    p1 = np.where(q == 0, np.where(t == 1, 1.0, 0.0), p1)
    p1 = np.where(t == 0, 0.0, p1)
    return p0, p1


def mean_and_variance(t, p, f, model: ChannelModel):
    """Vectorised per-frame mean and variance of Z, broadcasting t, p, f."""
    f = np.asarray(f, dtype=float)
    p0, p1 = _empty_and_single(t, np.asarray(p, dtype=float) / f)
    if model is ChannelModel.ZERO_ONE:
        pn = 1.0 - p0
        mu = pn - p0
        var = (pn + p0 - mu**2) / f
    else:
        pe = np.clip(1.0 - p0 - p1, 0.0, 1.0)
        mu = pe - p1
        var = (pe + p1 - mu**2) / f
    return mu, np.maximum(var, 0.0)


def slot_probs(point: LoadPoint, model: ChannelModel) -> SlotProbs:
    p0, p1 = _empty_and_single(point.t, point.p / point.f)
    p0, p1 = float(p0), float(p1)
    if model is ChannelModel.ZERO_ONE:
        # a {0,1} reader cannot split non-empty slots, so p1 and pe stay 0
        return SlotProbs(p0=p0, p1=0.0, pe=0.0, pn=1.0 - p0)
    pe = max(0.0, 1.0 - p0 - p1)
    return SlotProbs(p0=p0, p1=p1, pe=pe, pn=1.0 - p0)


def expected_z(point: LoadPoint, model: ChannelModel) -> float:
    mu, _ = mean_and_variance(point.t, point.p, point.f, model)
    return float(mu)


def variance_z(point: LoadPoint, model: ChannelModel) -> float:
    _, var = mean_and_variance(point.t, point.p, point.f, model)
    return float(var)


def dip_location(p: float, f: int) -> float:
    """Population at the bottom of the {0,1,e} expectation curve, f/(2p).

    This is the small-``p/f`` limit; the exact argmin sits about 1/4 to
    the right of it.
    """
    if not (0 < p <= 1) or f < 1:
        raise ValueError("need p in (0, 1] and f >= 1")
    return f / (2.0 * p)


def _exact_dip(p: float, f: int) -> float:
    x = p / f
    lq = math.log1p(-x)
    return (-2.0 * x - (1.0 - x) * lq) / (2.0 * x * lq)


def _g(t: float, p: float, f: int, model: ChannelModel) -> float:
    mu, _ = mean_and_variance(t, p, f, model)
    return float(mu)


def invert_expected_z(zbar: float, p: float, f: int, model: ChannelModel) -> float:
    """Population whose expected Z equals ``zbar`` at persistence p, frame f.

    For {0,1} this is the closed-form log ratio. For {0,1,e} the root is
    searched right of the dip only, so the larger of two candidate roots
    is always returned.
    """
    if not (0 < p <= 1) or f < 1:
        raise ValueError("need p in (0, 1] and f >= 1")
    x = p / f
    if model is ChannelModel.ZERO_ONE:
        if zbar <= -1.0:
            return 0.0
        if zbar >= 1.0:
            raise OutOfRange(f"zbar={zbar} saturates the {{0,1}} curve")
        if x >= 1.0:
            raise OutOfRange("p/f = 1 leaves nothing to invert between 0 and saturation")
        return math.log((1.0 - zbar) / 2.0) / math.log1p(-x)

    if x >= 1.0:
        raise OutOfRange("p/f = 1 leaves nothing to invert for {0,1,e}")
    t_dip = dip_location(p, f)
    g_dip = _g(t_dip, p, f, model)
    g_floor = min(g_dip, _g(_exact_dip(p, f), p, f, model))
    if zbar < g_floor - 1e-15:
        raise OutOfRange(f"zbar={zbar} lies below the dip minimum {g_floor}")
    if zbar <= g_dip:
        return t_dip

    lo, hi = t_dip, max(2.0 * t_dip, 1.0)
    while _g(hi, p, f, model) < zbar:
        lo = hi
        if hi >= BRACKET_CAP:
            raise OutOfRange(f"zbar={zbar} exceeds the curve up to t={BRACKET_CAP:g}")
        hi = min(2.0 * hi, BRACKET_CAP)
    for _ in range(200):
        if hi - lo <= BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _g(mid, p, f, model) < zbar:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
