"""Frame-size planning from the Lindeberg-Feller condition.

The pipeline is: k(r) -> admissible frame sizes [f_min, f_max] -> rounds n
for each candidate frame -> cheapest (f + l) * n over a (r, f) grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import Degenerate, Infeasible, InvalidUpperBound
from .stats import ChannelModel, mean_and_variance

R_MIN = 1.2564  # below this load the {0,1,e} curve is ambiguous
FRAME_GAP = 3.33  # inter-frame delay, in slots
DEGENERATE_EPS = 1e-12
_R_SCAN_MAX = 50.0


@dataclass(frozen=True)
class AccuracySpec:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 <= self.alpha < 1):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not (0 < self.beta < 1):
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")

    @property
    def eps_max(self) -> float:
        return 1.0 - self.alpha


@dataclass(frozen=True)
class ApproxBound:
    r: float
    k: float
    eps: float


@dataclass(frozen=True)
class PlannerConfig:
    r_points: int = 200
    f_points: int = 64
    frame_gap: float = FRAME_GAP
    # lower end of the {0,1} load grid, relative to r_max
    r_floor_ratio: float = 1e-4


@dataclass(frozen=True)
class FramePlan:
    model: ChannelModel
    t_m: float
    r_op: float
    f_op: int
    p_op: float
    n_op: int
    eps_op: float
    total_slots: float
    spec: AccuracySpec = field(compare=False, default=None)
    compensated: bool = True


def _k_cases(r, model: ChannelModel):
    """Per-case constants and their denominators, elementwise in r."""
    r = np.asarray(r, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if model is ChannelModel.ZERO_ONE:
            em1 = np.expm1(r)  # e^r - 1 == (1 - e^-r) / e^-r
            dens = (-np.expm1(-r), np.exp(-r))
            ks = (1.0 / em1, em1)
            return ks, dens
        e = np.exp(r)
        a = 1.0 + 2.0 * r
        b = 1.0 + 4.0 * r
        d1 = np.abs(-e * b / a**2) - 1.0
        d2 = 0.25 * a**2 - r * e
        d3 = a**2 - e * b
        k1 = 1.0 / d1
        k2 = np.abs((e**2 + a * (0.25 - e)) / d2)
        k3 = np.abs((e**2 - 2.0 * e * a + a**2) / d3)
        return (k1, k2, k3), (d1, d2, d3)


def _k_array(r, model: ChannelModel):
    """k(r) elementwise; NaN where any case is degenerate."""
    ks, dens = _k_cases(r, model)
    k = np.maximum.reduce([np.asarray(x, dtype=float) for x in ks])
    bad = np.zeros(np.shape(k), dtype=bool)
    for d in dens:
        bad |= ~(np.abs(d) >= DEGENERATE_EPS)
    return np.where(bad, np.nan, k)


def k_bound(r: float, model: ChannelModel) -> float:
    if not r > 0:
        raise ValueError(f"load must be positive, got {r}")
    ks, dens = _k_cases(r, model)
    for i, d in enumerate(dens, start=1):
        if not abs(float(d)) >= DEGENERATE_EPS:
            raise Degenerate(f"k{i}({r}) has a vanishing denominator for {model.name}")
    return max(float(k) for k in ks)


def epsilon_for(f: int, r: float, model: ChannelModel) -> float:
    """Gaussian approximation error certified by a frame of ``f`` slots."""
    if f < 1:
        raise ValueError("f must be >= 1")
    return math.sqrt(k_bound(r, model) / f)


def approx_bound(f: int, r: float, model: ChannelModel) -> ApproxBound:
    k = k_bound(r, model)
    return ApproxBound(r=r, k=k, eps=math.sqrt(k / f))


def _ceil(x: float) -> int:
    # absorb round-off such as 527.0000000000001
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def frame_bounds(r: float, t_m: float, eps_max: float, model: ChannelModel) -> tuple[int, int]:
    if t_m < 1:
        raise InvalidUpperBound(f"t_m must be >= 1, got {t_m}")
    if not (0 < eps_max < 1):
        raise ValueError("eps_max must lie in (0, 1)")
    f_max = max(1, math.floor(t_m / r))
    f_min = max(1, _ceil(k_bound(r, model) / eps_max**2))
    if f_min > f_max:
        raise Infeasible(f"f_min={f_min} exceeds f_max={f_max} at r={r}, t_m={t_m}")
    return f_min, f_max


def q_inverse(q):
    """Inverse of the standard normal upper tail, Q^-1(q)."""
    return -ndtri(q)


def round_requirements(f, p, t_m, spec: AccuracySpec, eps, model: ChannelModel):
    """Return (n_left, n_right) before the ceiling; broadcasts over arrays."""
    eps = np.asarray(eps, dtype=float)
    tail = (1.0 - spec.alpha - eps) / 2.0
    z = np.where(tail > 0, q_inverse(np.where(tail > 0, tail, 0.5)), np.nan)
    mu, var = mean_and_variance(t_m, p, f, model)
    g_lo, _ = mean_and_variance((1.0 - spec.beta) * t_m, p, f, model)
    g_hi, _ = mean_and_variance((1.0 + spec.beta) * t_m, p, f, model)
    with np.errstate(divide="ignore", invalid="ignore"):
        n_left = z**2 * var / (g_lo - mu) ** 2
        n_right = z**2 * var / (g_hi - mu) ** 2
    return n_left, n_right


def rounds_needed(
    f: int,
    p: float,
    t_m: float,
    spec: AccuracySpec,
    eps: float,
    model: ChannelModel,
) -> int:
    """Frames needed so the averaged Z lands inside the beta window.

    Targets ``alpha + eps``; pass ``eps=0`` to drop the approximation-error
    compensation.
    """
    if spec.alpha + eps >= 1:
        raise Infeasible(f"alpha + eps = {spec.alpha + eps} leaves no approximation budget")
    n_left, n_right = (float(v) for v in round_requirements(f, p, t_m, spec, eps, model))
    if not (math.isfinite(n_left) and math.isfinite(n_right)):
        raise Infeasible("beta window collapses onto the mean at this operating point")
    return max(1, _ceil(max(n_left, n_right)))


def _feasibility_gap(r, t_m, eps_max, model):
    # >= 0 where eps_max^2 * t_m / r >= k(r)
    k = _k_array(r, model)
    return np.where(np.isnan(k), -np.inf, eps_max**2 * t_m / np.asarray(r) - k)


def _refine(lo_ok, hi_bad, t_m, eps_max, model, tol=1e-9):
    """Bisect the feasibility boundary between a feasible and an infeasible load."""
    a, b = lo_ok, hi_bad
    while abs(b - a) > tol:
        m = 0.5 * (a + b)
        if float(_feasibility_gap(m, t_m, eps_max, model)) >= 0:
            a = m
        else:
            b = m
    return a


def feasible_load_range(t_m: float, eps_max: float, model: ChannelModel) -> tuple[float, float]:
    """Smallest and largest load at which f_max >= f_min (real-valued frames).

    For {0,1} a lower end of 0.0 means every small load is admissible.
    """
    if t_m < 1:
        raise InvalidUpperBound(f"t_m must be >= 1, got {t_m}")
    lo = R_MIN if model is ChannelModel.ZERO_ONE_E else 1e-8
    grid = np.geomspace(lo, _R_SCAN_MAX, 4000)
    ok = _feasibility_gap(grid, t_m, eps_max, model) >= 0
    if not ok.any():
        raise Infeasible(f"no load satisfies eps_max^2 * t_m / r >= k(r) for t_m={t_m}")
    idx = np.flatnonzero(ok)
    first, last = idx[0], idx[-1]
    r_hi = float(grid[last]) if last == len(grid) - 1 else _refine(
        float(grid[last]), float(grid[last + 1]), t_m, eps_max, model
    )
    if first == 0:
        r_lo = lo if model is ChannelModel.ZERO_ONE_E else 0.0
    else:
        r_lo = _refine(float(grid[first]), float(grid[first - 1]), t_m, eps_max, model)
    return r_lo, r_hi


def r_max(t_m: float, eps_max: float, model: ChannelModel) -> float:
    return feasible_load_range(t_m, eps_max, model)[1]


def min_estimable_upper_bound(spec: AccuracySpec, model: ChannelModel = ChannelModel.ZERO_ONE_E) -> float:
    """Smallest upper bound t_m that admits any frame size.

    For {0,1,e} this is evaluated at R_MIN. For {0,1}, r*k(r) is smallest
    at r = ln 2 where k = 1, giving ln(2) / eps_max^2.
    """
    if model is ChannelModel.ZERO_ONE_E:
        return k_bound(R_MIN, model) * R_MIN / spec.eps_max**2
    return math.log(2.0) / spec.eps_max**2


def _frame_candidates(f_min: int, f_max: int, points: int) -> np.ndarray:
    f = np.rint(np.geomspace(f_min, f_max, points)).astype(np.int64)
    return np.unique(np.concatenate([[f_min, f_max], f]))


def plan(
    spec: AccuracySpec,
    t_m: float,
    model: ChannelModel,
    config: PlannerConfig = PlannerConfig(),
    compensate: bool = True,
) -> FramePlan:
    """Cheapest (r, f, p, n) meeting ``spec`` for populations up to ``t_m``.

    Ties on (f + l) * n go to the smaller frame, then the smaller load.
    """
    if not t_m >= 1:
        raise InvalidUpperBound(f"t_m must be >= 1, got {t_m}")
    eps_max = spec.eps_max
    if model is ChannelModel.ZERO_ONE_E:
        t_ml = min_estimable_upper_bound(spec, model)
        if t_m < t_ml:
            raise Infeasible(f"t_m={t_m} is below t_ml={t_ml:.1f} for {{0,1,e}}")
    r_lo, r_hi = feasible_load_range(t_m, eps_max, model)
    if model is ChannelModel.ZERO_ONE:
        r_lo = max(r_lo, r_hi * config.r_floor_ratio)
    loads = np.unique(np.geomspace(r_lo, r_hi, config.r_points))

    rs, fs = [], []
    for r in loads:
        k = _k_array(r, model)
        if np.isnan(k):
            continue
        f_max = math.floor(t_m / r)
        f_min = max(1, _ceil(float(k) / eps_max**2))
        if f_min > f_max:
            continue
        cand = _frame_candidates(f_min, f_max, config.f_points)
        rs.append(np.full(cand.shape, r))
        fs.append(cand)
    if not rs:
        raise Infeasible(f"no (r, f) cell is admissible for t_m={t_m}")
    r_cells = np.concatenate(rs)
    f_cells = np.concatenate(fs)

    k_cells = _k_array(r_cells, model)
    eps_cells = np.sqrt(k_cells / f_cells)
    p_cells = np.minimum(r_cells * f_cells / t_m, 1.0)
    eps_target = eps_cells if compensate else np.zeros_like(eps_cells)
    n_left, n_right = round_requirements(f_cells, p_cells, t_m, spec, eps_target, model)
    n_real = np.fmax(n_left, n_right)
    valid = np.isfinite(n_real) & (spec.alpha + eps_target < 1) & (eps_cells <= eps_max)
    if not valid.any():
        raise Infeasible(f"every admissible cell exhausts the approximation budget at t_m={t_m}")
    n_cells = np.ones_like(n_real)
    n_cells[valid] = np.maximum(
        1, np.ceil(n_real[valid] - 1e-9 * np.maximum(1.0, np.abs(n_real[valid])))
    )
    cost = np.where(valid, (f_cells + config.frame_gap) * n_cells, np.inf)

    best = np.lexsort((r_cells, f_cells, cost))[0]
    f_op = int(f_cells[best])
    n_op = int(n_cells[best])
    return FramePlan(
        model=model,
        t_m=float(t_m),
        r_op=float(r_cells[best]),
        f_op=f_op,
        p_op=float(p_cells[best]),
        n_op=n_op,
        eps_op=float(eps_cells[best]),
        total_slots=(f_op + config.frame_gap) * n_op,
        spec=spec,
        compensated=compensate,
    )
