"""Block counting and ℓ-length block entropy rates, disjoint and sliding.

Large inputs go through ``BlockCounter``, which encodes each ℓ-block as a
base-σ integer and accumulates counts chunk by chunk, so a stream is never
materialized.  The liminf over prefixes is estimated by the running minimum
over a geometric checkpoint schedule, ignoring checkpoints before a burn-in
of 100·σ^ℓ symbols.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import BINARY, Alphabet, Distribution, Word, as_indices
from .errors import EmptyCounts, LengthNotMultiple, StreamExhausted, WordTooShort
from .seqgen import as_stream

MODES = ("disjoint", "sliding")
MAX_BLOCK_LENGTH = 12
SCHEDULE_RATIO = 1.5


@dataclass
class BlockCounts:
    block_length: int
    mode: str
    counts: dict[tuple[int, ...], int]
    window_total: int
    alphabet: Alphabet = BINARY

    def frequency(self, block) -> Fraction:
        return Fraction(self.counts.get(as_indices(block, self.alphabet), 0), self.window_total)

    def as_strings(self) -> dict[str, int]:
        return {self.alphabet.decode(b): c for b, c in sorted(self.counts.items())}

    def to_distribution(self) -> Distribution:
        return Distribution(
            self.alphabet,
            self.block_length,
            {b: Fraction(c, self.window_total) for b, c in self.counts.items() if c},
        )


def _word_data(x, alphabet):
    if isinstance(x, Word):
        return x.data, x.alphabet
    return as_indices(x, alphabet), alphabet


def count_disjoint(x, block_length: int, alphabet: Alphabet = BINARY) -> BlockCounts:
    data, alphabet = _word_data(x, alphabet)
    if block_length < 1 or len(data) % block_length:
        raise LengthNotMultiple(f"word length {len(data)} is not a multiple of {block_length}")
    counts: dict[tuple[int, ...], int] = {}
    for i in range(0, len(data), block_length):
        u = tuple(data[i:i + block_length])
        counts[u] = counts.get(u, 0) + 1
    return BlockCounts(block_length, "disjoint", counts, len(data) // block_length, alphabet)


def count_sliding(x, block_length: int, alphabet: Alphabet = BINARY) -> BlockCounts:
    # every window i = 0..n-l inclusive, so the n-l+1 normalizer is a true total
    data, alphabet = _word_data(x, alphabet)
    n = len(data)
    if block_length < 1 or n < block_length:
        raise WordTooShort(f"word of length {n} has no window of length {block_length}")
    counts: dict[tuple[int, ...], int] = {}
    for i in range(n - block_length + 1):
        u = tuple(data[i:i + block_length])
        counts[u] = counts.get(u, 0) + 1
    return BlockCounts(block_length, "sliding", counts, n - block_length + 1, alphabet)


def count_blocks(x, block_length: int, mode: str, alphabet: Alphabet = BINARY) -> BlockCounts:
    if mode == "disjoint":
        data, alphabet = _word_data(x, alphabet)
        usable = len(data) - len(data) % block_length
        return count_disjoint(tuple(data[:usable]), block_length, alphabet)
    if mode == "sliding":
        return count_sliding(x, block_length, alphabet)
    raise ValueError(f"unknown mode {mode!r}")


def entropy_from_counts(counts, block_length: int, sigma: int) -> float:
    c = np.asarray(counts, dtype=np.float64)
    total = c.sum()
    if total <= 0:
        raise EmptyCounts("no windows counted")
    p = c[c > 0] / total
    h = -float(np.sum(p * np.log2(p))) / (block_length * math.log2(sigma))
    return min(1.0, max(0.0, h))


def block_entropy(counts: BlockCounts) -> float:
    if counts.window_total <= 0:
        raise EmptyCounts("no windows counted")
    return entropy_from_counts(list(counts.counts.values()), counts.block_length, counts.alphabet.sigma)


class BlockCounter:
    """Streaming ℓ-block counter over base-σ block codes."""

    def __init__(self, sigma: int, block_length: int, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.sigma = sigma
        self.block_length = block_length
        self.mode = mode
        self.counts = np.zeros(sigma**block_length, dtype=np.int64)
        self.tail = np.zeros(0, dtype=np.uint8)
        self.consumed = 0
        self.window_total = 0
        self._weights = sigma ** np.arange(block_length - 1, -1, -1, dtype=np.int64)

    def feed(self, chunk: np.ndarray) -> None:
        if not len(chunk):
            return
        ell = self.block_length
        buf = np.concatenate([self.tail, chunk]) if len(self.tail) else chunk
        if self.mode == "sliding":
            m = len(buf) - ell + 1
            if m > 0:
                codes = np.zeros(m, dtype=np.int64)
                for j in range(ell):
                    codes = codes * self.sigma + buf[j:j + m]
                self._add(codes)
                self.tail = buf[m:].copy()
            else:
                self.tail = buf.copy()
        else:
            m = len(buf) // ell
            if m:
                codes = buf[: m * ell].reshape(m, ell).astype(np.int64) @ self._weights
                self._add(codes)
            self.tail = buf[m * ell:].copy()
        self.consumed += len(chunk)

    def _add(self, codes):
        self.counts += np.bincount(codes, minlength=len(self.counts))
        self.window_total += len(codes)

    def entropy(self) -> float:
        return entropy_from_counts(self.counts, self.block_length, self.sigma)

    def snapshot(self, alphabet: Alphabet) -> BlockCounts:
        ell = self.block_length
        counts = {}
        for code in np.flatnonzero(self.counts):
            block, c = [], int(code)
            for _ in range(ell):
                c, r = divmod(c, self.sigma)
                block.append(r)
            counts[tuple(reversed(block))] = int(self.counts[code])
        return BlockCounts(ell, self.mode, counts, self.window_total, alphabet)

    @property
    def prefix_length(self) -> int:
        # disjoint statistics are those of the prefix truncated to a multiple of l
        if self.mode == "disjoint":
            return self.window_total * self.block_length
        return self.consumed


@dataclass
class EntropyReport:
    block_length: int
    mode: str
    checkpoints: list[tuple[int, float]]
    running_min: float
    burn_in: int
    argmin_prefix: int = 0
    counts_at_min: BlockCounts | None = field(default=None, repr=False)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["prefix_len", "H_value"])
        for n, h in self.checkpoints:
            w.writerow([n, repr(h)])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "block_length": self.block_length,
            "mode": self.mode,
            "burn_in": self.burn_in,
            "running_min": self.running_min,
            "argmin_prefix": self.argmin_prefix,
            "checkpoints": [{"prefix_len": n, "H_value": h} for n, h in self.checkpoints],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def default_burn_in(block_length: int, sigma: int) -> int:
    return 100 * sigma**block_length


def checkpoint_schedule(n: int, n0: int, ratio: float = SCHEDULE_RATIO, granule: int = 1) -> list[int]:
    """Prefix lengths ⌈n0·ratio^j⌉ below n, rounded up to a multiple of
    ``granule``, followed by n itself."""
    n0 = max(1, n0)
    out, j = [], 0
    while True:
        c = math.ceil(n0 * ratio**j)
        c = -(-c // granule) * granule
        if c >= n:
            break
        if not out or c > out[-1]:
            out.append(c)
        j += 1
    out.append(n)
    return out


@dataclass
class _Track:
    counter: BlockCounter
    schedule: list[int]
    burn_in: int
    points: list = field(default_factory=list)
    best: tuple | None = None  # (H, prefix_len, BlockCounts)
    alphabet: Alphabet = BINARY
    last_consumed: int = 0

    def record(self):
        c = self.counter
        if c.window_total == 0:
            raise StreamExhausted(
                f"stream ended before one full block of length {c.block_length} was seen"
            )
        h = c.entropy()
        plen = c.prefix_length
        self.last_consumed = c.consumed
        self.points.append((plen, h))
        if c.consumed >= self.burn_in and (self.best is None or h <= self.best[0]):
            self.best = (h, plen, c.snapshot(self.alphabet))

    def report(self) -> EntropyReport:
        best = self.best
        if best is None:
            # nothing past burn-in: the final checkpoint stands in
            c = self.counter
            plen, h = self.points[-1]
            best = (h, plen, c.snapshot(self.alphabet))
        return EntropyReport(self.counter.block_length, self.counter.mode, self.points,
                             best[0], self.burn_in, best[1], best[2])


def entropy_profiles(X, block_lengths, modes, n: int | None = None, schedule=None,
                     burn_in: int | None = None, alphabet: Alphabet = BINARY) -> dict:
    """One pass over ``X`` feeding a counter per (ℓ, mode); returns {(ℓ, mode): EntropyReport}."""
    stream = as_stream(X, alphabet)
    alphabet = stream.alphabet
    sigma = alphabet.sigma
    if n is None:
        n = stream.length
        if n is None:
            raise ValueError("n is required for streams of unknown length")
    elif stream.length is not None and stream.length < n:
        n = stream.length
    tracks: list[_Track] = []
    for ell in block_lengths:
        if not 1 <= ell <= MAX_BLOCK_LENGTH:
            raise ValueError(f"block length must be in 1..{MAX_BLOCK_LENGTH}, got {ell}")
        b = default_burn_in(ell, sigma) if burn_in is None else burn_in
        sched = sorted(set(int(c) for c in schedule if 0 < c <= n)) if schedule is not None else checkpoint_schedule(n, min(b, n), granule=ell * sigma**ell)
        if not sched:
            raise ValueError("empty checkpoint schedule")
        for mode in modes:
            tracks.append(_Track(BlockCounter(sigma, ell, mode), list(sched), b, alphabet=alphabet))
    stops = sorted({c for t in tracks for c in t.schedule})
    pos, si = 0, 0
    for chunk in stream.limit(n).chunks():
        start = 0
        while start < len(chunk):
            if si >= len(stops):
                break
            take = min(len(chunk) - start, stops[si] - pos)
            piece = chunk[start:start + take]
            for t in tracks:
                t.counter.feed(piece)
            pos += take
            start += take
            if pos == stops[si]:
                for t in tracks:
                    if t.schedule and t.schedule[0] == pos:
                        t.schedule.pop(0)
                        t.record()
                si += 1
    for t in tracks:
        if not t.points:
            raise StreamExhausted(f"stream ended at {pos} symbols, before the first checkpoint")
        if t.schedule and t.counter.consumed > t.last_consumed:
            # stream shorter than requested: close with the actual length
            t.record()
    return {(t.counter.block_length, t.counter.mode): t.report() for t in tracks}


def entropy_profile(X, block_length: int, mode: str, schedule=None, n: int | None = None,
                    burn_in: int | None = None, alphabet: Alphabet = BINARY) -> EntropyReport:
    return entropy_profiles(X, [block_length], [mode], n=n, schedule=schedule,
                            burn_in=burn_in, alphabet=alphabet)[(block_length, mode)]


@dataclass
class DimensionEstimate:
    per_l: dict[int, float]
    estimate: float
    mode: str
    n_used: int
    reports: dict[int, EntropyReport] = field(default_factory=dict, repr=False)

    @property
    def best_block_length(self) -> int:
        return min(self.per_l, key=lambda ell: (self.per_l[ell], ell))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n_used": self.n_used,
            "estimate": self.estimate,
            "per_l": {str(k): v for k, v in sorted(self.per_l.items())},
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["l", "H_l"])
        for ell, h in sorted(self.per_l.items()):
            w.writerow([ell, repr(h)])
        return out.getvalue()


def estimates_from_reports(reports: dict, modes, block_lengths, n_used: int) -> dict[str, DimensionEstimate]:
    out = {}
    for mode in modes:
        per = {ell: reports[(ell, mode)].running_min for ell in block_lengths}
        out[mode] = DimensionEstimate(per, min(per.values()), mode, n_used,
                                      {ell: reports[(ell, mode)] for ell in block_lengths})
    return out


def entropy_rate_estimate(X, L_max: int, mode: str, n: int | None = None,
                          alphabet: Alphabet = BINARY, schedule=None) -> DimensionEstimate:
    if n is not None and n < L_max:
        raise ValueError(f"n={n} is smaller than L_max={L_max}")
    stream = as_stream(X, alphabet)
    if n is None:
        n = stream.length
    ls = list(range(1, L_max + 1))
    reports = entropy_profiles(stream, ls, [mode], n=n, schedule=schedule)
    n_used = max(r.checkpoints[-1][0] for r in reports.values())
    return estimates_from_reports(reports, [mode], ls, n_used)[mode]
