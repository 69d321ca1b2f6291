import io
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gean.sim import (
    FrameTally,
    Population,
    ReaderSequence,
    ReplyModel,
    Symbol,
    derive_seed,
    read_trace,
    run_frame,
    tally,
    write_trace,
    z_samples,
    z_statistic,
)
from gean.stats import ChannelModel, LoadPoint, expected_z, slot_probs, variance_z

ZO, ZOE = ChannelModel.ZERO_ONE, ChannelModel.ZERO_ONE_E
HASH, INDEP = ReplyModel.HASH_ONCE, ReplyModel.INDEPENDENT


@pytest.mark.parametrize("reply", list(ReplyModel))
def test_empty_population_gives_empty_frame(reply):
    seq = run_frame(Population(0, seed=3), 5, 1.0, reply, ZO, frame_seed=11)
    assert seq.symbols == [Symbol.EMPTY] * 5


def test_single_agent_single_slot():
    seq = run_frame(Population(1), 1, 1.0, HASH, ZOE, frame_seed=0)
    assert seq.symbols == [Symbol.SINGLETON]


def test_sequence_length_matches_frame():
    seq = run_frame(Population(40, seed=1), 73, 0.4, INDEP, ZOE, frame_seed=2)
    assert len(seq) == 73


def test_tally_examples():
    seq = ReaderSequence.from_symbols([Symbol.EMPTY, Symbol.SINGLETON, Symbol.COLLISION], ZOE)
    assert tally(seq) == FrameTally(3, 1, 1, 1)
    seq = ReaderSequence.from_symbols([Symbol.EMPTY] * 8, ZO)
    assert tally(seq) == FrameTally(8, 8, 0, 0)


def test_tally_rejects_inconsistent_counts():
    with pytest.raises(ValueError):
        FrameTally(5, 1, 1, 1)
    with pytest.raises(ValueError):
        FrameTally(3, -1, 3, 1)


def test_tally_sums_to_frame_size():
    rng = np.random.default_rng(5)
    for i in range(1000):
        f = int(rng.integers(1, 300))
        t = int(rng.integers(0, 2000))
        p = float(rng.uniform(0.01, 1.0))
        model = ZO if i % 2 else ZOE
        reply = HASH if i % 3 == 0 else INDEP
        tl = tally(run_frame(Population(t, seed=i), f, p, reply, model, frame_seed=i))
        assert tl.n0 + tl.n1 + tl.ne == f
        if model is ZO:
            assert tl.ne == 0 and tl.nn == tl.n1


def test_z_statistic_examples():
    assert z_statistic(FrameTally(10, 10, 0, 0), ZO) == -1.0
    assert z_statistic(FrameTally(10, 0, 10, 0), ZOE) == -1.0
    assert z_statistic(FrameTally(4, 1, 1, 2), ZOE) == 0.25
    assert z_statistic(FrameTally(4, 1, 3, 0), ZO) == 0.5


def test_marginal_law_empty_fraction():
    # 10^4 frames through the per-frame path at (t=1000, f=500, p=1)
    pop = Population(1000, seed=42)
    empties = sum(
        tally(run_frame(pop, 500, 1.0, INDEP, ZOE, frame_seed=j)).n0 for j in range(10**4)
    )
    slots = 500 * 10**4
    p0 = (1 - 1 / 500) ** 1000
    assert abs(empties / slots - p0) <= 3 * math.sqrt(p0 * (1 - p0) / slots)


def test_marginal_law_all_symbols():
    pop = Population(300, seed=8)
    counts = np.zeros(3)
    for j in range(4000):
        counts += np.bincount(run_frame(pop, 200, 1.0, INDEP, ZOE, frame_seed=j).codes, minlength=3)
    n = counts.sum()
    sp = slot_probs(LoadPoint(300, 1.0, 200), ZOE)
    for got, want in zip(counts / n, (sp.p0, sp.p1, sp.pe)):
        assert abs(got - want) <= 3 * math.sqrt(want * (1 - want) / n)


def test_mean_z_matches_expectation():
    z = z_samples(1000, 500, 1.0, INDEP, ZOE, frames=10**5, seed=2024)
    point = LoadPoint(1000, 1.0, 500)
    sigma = math.sqrt(variance_z(point, ZOE))
    assert abs(z.mean() - expected_z(point, ZOE)) <= 3 * sigma / math.sqrt(10**5)


def test_bulk_and_per_frame_paths_agree_in_law():
    pop = Population(400, seed=1)
    per_frame = [
        z_statistic(tally(run_frame(pop, 250, 0.7, INDEP, ZO, frame_seed=j)), ZO) for j in range(4000)
    ]
    bulk = z_samples(400, 250, 0.7, INDEP, ZO, frames=4000, seed=1)
    se = math.sqrt(np.var(per_frame) / 4000 + np.var(bulk) / 4000)
    assert abs(np.mean(per_frame) - np.mean(bulk)) <= 3 * se


def test_hash_once_mean_matches_independent():
    a = z_samples(1000, 500, 1.0, HASH, ZO, frames=10**5, seed=1)
    b = z_samples(1000, 500, 1.0, INDEP, ZO, frames=10**5, seed=2)
    se = math.sqrt(a.var() / a.size + b.var() / b.size)
    assert abs(a.mean() - b.mean()) <= 3 * se


@pytest.mark.parametrize("reply", list(ReplyModel))
def test_identical_seeds_reproduce_frames(reply):
    pop = Population(777, seed=9)
    a = run_frame(pop, 300, 0.8, reply, ZOE, frame_seed=123)
    b = run_frame(pop, 300, 0.8, reply, ZOE, frame_seed=123)
    c = run_frame(pop, 300, 0.8, reply, ZOE, frame_seed=124)
    assert a == b
    assert a != c


def test_frames_independent_of_scheduling():
    pop = Population(500, seed=4)
    seeds = [derive_seed(7, j) for j in range(64)]
    serial = [run_frame(pop, 200, 1.0, INDEP, ZOE, s) for s in seeds]
    with ThreadPoolExecutor(4) as ex:
        threaded = list(ex.map(lambda s: run_frame(pop, 200, 1.0, INDEP, ZOE, s), reversed(seeds)))
    assert serial == threaded[::-1]


def test_derive_seed_is_pure_and_order_sensitive():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(3, 2, 1)
    assert 0 <= derive_seed(-1, 2**70) < 2**64


@given(
    codes=st.lists(st.lists(st.integers(0, 2), min_size=1, max_size=40), min_size=0, max_size=10),
    start=st.integers(0, 1000),
)
def test_trace_round_trip(codes, start):
    frames = [ReaderSequence(np.array(c, dtype=np.uint8), ZOE) for c in codes]
    fh = io.StringIO()
    assert write_trace(frames, fh, start) == len(frames)
    fh.seek(0)
    back = read_trace(fh, ZOE)
    assert [i for i, _ in back] == list(range(start, start + len(frames)))
    assert [s for _, s in back] == frames


def test_trace_format():
    fh = io.StringIO()
    write_trace([ReaderSequence.from_string("01e0", ZOE), ReaderSequence.from_string("11", ZO)], fh)
    assert fh.getvalue() == "0,01e0\n1,11\n"
    with pytest.raises(ValueError):
        ReaderSequence.from_string("0e", ZO)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        Population(-1)
    with pytest.raises(ValueError):
        run_frame(Population(5), 0, 0.5)
    with pytest.raises(ValueError):
        run_frame(Population(5), 10, 0.0)
    assert ReplyModel.parse("HashOnce") is HASH
