"""Framed slotted Aloha channel simulation.

Randomness for a frame is a pure function of ``(population seed, frame seed)``
so frames can be replayed in any order or in parallel.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .stats import ChannelModel

_MASK64 = (1 << 64) - 1


class ReplyModel(enum.Enum):
    HASH_ONCE = "hash"  # a participant picks exactly one slot
    INDEPENDENT = "indep"  # every (agent, slot) pair fires with prob p/f

    @classmethod
    def parse(cls, value: "str | ReplyModel") -> "ReplyModel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "")
        if key in ("hash", "hashonce"):
            return cls.HASH_ONCE
        if key in ("indep", "independent", "independentperslot"):
            return cls.INDEPENDENT
        raise ValueError(f"unknown reply model {value!r}")


class Symbol(enum.IntEnum):
    EMPTY = 0
    SINGLETON = 1  # doubles as NonEmpty under {0,1}
    COLLISION = 2


NON_EMPTY = Symbol.SINGLETON
_CHARS = np.array(["0", "1", "e"])


@dataclass(frozen=True)
class Population:
    t: int
    seed: int = 0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"population size must be >= 0, got {self.t}")


@dataclass(frozen=True, eq=False)
class ReaderSequence:
    """What the reader saw in one frame, one symbol code per slot."""

    codes: np.ndarray
    model: ChannelModel

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other):
        if not isinstance(other, ReaderSequence):
            return NotImplemented
        return self.model is other.model and np.array_equal(self.codes, other.codes)

    @property
    def symbols(self) -> list[Symbol]:
        return [Symbol(int(c)) for c in self.codes]

    def to_string(self) -> str:
        return "".join(_CHARS[self.codes])

    @classmethod
    def from_string(cls, text: str, model: ChannelModel) -> "ReaderSequence":
        lookup = {"0": 0, "1": 1, "e": 2}
        codes = np.fromiter((lookup[c] for c in text), dtype=np.uint8, count=len(text))
        if model is ChannelModel.ZERO_ONE and (codes == 2).any():
            raise ValueError("collision symbol in a {0,1} sequence")
        return cls(codes=codes, model=model)

    @classmethod
    def from_symbols(cls, symbols: Iterable[Symbol], model: ChannelModel) -> "ReaderSequence":
        return cls(codes=np.array([int(s) for s in symbols], dtype=np.uint8), model=model)


@dataclass(frozen=True)
class FrameTally:
    f: int
    n0: int
    n1: int
    ne: int

    def __post_init__(self):
        if min(self.n0, self.n1, self.ne) < 0 or self.n0 + self.n1 + self.ne != self.f:
            raise ValueError(f"inconsistent tally {self}")

    @property
    def nn(self) -> int:
        return self.f - self.n0


def derive_seed(*keys: int) -> int:
    """Mix integer keys into one 64-bit seed (order-sensitive, pure)."""
    ss = np.random.SeedSequence([k & _MASK64 for k in keys])
    return int(ss.generate_state(1, np.uint64)[0])


def frame_rng(pop_seed: int, frame_seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([pop_seed & _MASK64, frame_seed & _MASK64]))


def occupancy(t: int, f: int, p: float, reply: ReplyModel, rng: np.random.Generator) -> np.ndarray:
    """Number of replies landing in each of the ``f`` slots."""
    if reply is ReplyModel.INDEPENDENT:
        return rng.binomial(t, p / f, size=f)
    m = t if p >= 1 else int(rng.binomial(t, p))
    return np.bincount(rng.integers(0, f, size=m), minlength=f)


def reduce_counts(counts: np.ndarray, model: ChannelModel) -> np.ndarray:
    if model is ChannelModel.ZERO_ONE:
        return (counts > 0).astype(np.uint8)
    return np.minimum(counts, 2).astype(np.uint8)


def _check_frame(f, p):
    if f < 1:
        raise ValueError(f"f must be >= 1, got {f}")
    if not (0 < p <= 1):
        raise ValueError(f"p must lie in (0, 1], got {p}")


def run_frame(
    pop: Population,
    f: int,
    p: float,
    reply: ReplyModel = ReplyModel.INDEPENDENT,
    model: ChannelModel = ChannelModel.ZERO_ONE,
    frame_seed: int = 0,
) -> ReaderSequence:
    _check_frame(f, p)
    rng = frame_rng(pop.seed, frame_seed)
    counts = occupancy(pop.t, f, p, reply, rng)
    return ReaderSequence(codes=reduce_counts(counts, model), model=model)


def tally(seq: ReaderSequence) -> FrameTally:
    c = np.bincount(seq.codes, minlength=3)
    return FrameTally(f=len(seq), n0=int(c[0]), n1=int(c[1]), ne=int(c[2]))


def z_statistic(t: FrameTally, model: ChannelModel) -> float:
    if model is ChannelModel.ZERO_ONE:
        return (t.nn - t.n0) / t.f
    return (t.ne - t.n1) / t.f


def z_samples(
    t: int,
    f: int,
    p: float,
    reply: ReplyModel,
    model: ChannelModel,
    frames: int,
    seed: int,
    chunk: int = 4096,
) -> np.ndarray:
    """Per-frame Z for many independent frames, drawn in bulk.

    Same channel law as :func:`run_frame`, but one stream for the whole
    batch; meant for Monte Carlo checks, not for replaying single frames.
    """
    _check_frame(f, p)
    rng = np.random.default_rng(np.random.SeedSequence([seed & _MASK64, 0xBA7C4]))
    out = np.empty(frames)
    done = 0
    while done < frames:
        rows = min(chunk, frames - done)
        if reply is ReplyModel.INDEPENDENT:
            counts = rng.binomial(t, p / f, size=(rows, f))
        else:
            m = np.full(rows, t) if p >= 1 else rng.binomial(t, p, size=rows)
            owner = np.repeat(np.arange(rows), m)
            slot = rng.integers(0, f, size=owner.size)
            counts = np.bincount(owner * f + slot, minlength=rows * f).reshape(rows, f)
        if model is ChannelModel.ZERO_ONE:
            n0 = (counts == 0).sum(axis=1)
            out[done : done + rows] = (f - 2 * n0) / f
        else:
            n1 = (counts == 1).sum(axis=1)
            ne = (counts > 1).sum(axis=1)
            out[done : done + rows] = (ne - n1) / f
        done += rows
    return out


def write_trace(frames: Iterable[ReaderSequence], fh: TextIO, start: int = 0) -> int:
    """Dump ``frame_index,symbol_string`` lines; returns the number written."""
    n = 0
    for i, seq in enumerate(frames, start=start):
        fh.write(f"{i},{seq.to_string()}\n")
        n += 1
    return n


def read_trace(fh: TextIO, model: ChannelModel) -> list[tuple[int, ReaderSequence]]:
    out = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        idx, _, text = line.partition(",")
        out.append((int(idx), ReaderSequence.from_string(text, model)))
    return out
