"""Alphabets, words, exact-rational block distributions and factored capital."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    BadBlockLength,
    NegativeWeight,
    PrefixTooLong,
    SumNotOne,
    ZeroMarginal,
)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...] = ("0", "1")

    def __post_init__(self):
        syms = tuple(self.symbols)
        object.__setattr__(self, "symbols", syms)
        if len(syms) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(syms)) != len(syms):
            raise ValueError(f"duplicate glyphs in alphabet {syms}")

    @classmethod
    def of_size(cls, sigma: int) -> "Alphabet":
        if sigma > 10:
            return cls(tuple(chr(ord("a") + i) for i in range(sigma)))
        return cls(tuple(str(i) for i in range(sigma)))

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.symbols)}

    def index(self, glyph: str) -> int:
        return self._index[glyph]

    def encode(self, text: str) -> tuple[int, ...]:
        try:
            return tuple(self._index[c] for c in text)
        except KeyError as exc:
            raise ValueError(f"glyph {exc.args[0]!r} not in alphabet {self.symbols}") from None

    def decode(self, data: Iterable[int]) -> str:
        return "".join(self.symbols[i] for i in data)

    def blocks(self, length: int) -> Iterable[tuple[int, ...]]:
        """All of Σ^length in lexicographic order."""
        return itertools.product(range(self.sigma), repeat=length)


BINARY = Alphabet()


@dataclass(frozen=True)
class Word:
    """A finite word stored as symbol indices."""

    alphabet: Alphabet
    data: tuple[int, ...]

    def __post_init__(self):
        data = tuple(int(a) for a in self.data)
        object.__setattr__(self, "data", data)
        sigma = self.alphabet.sigma
        if any(a < 0 or a >= sigma for a in data):
            raise ValueError("symbol index out of range for alphabet")

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet = BINARY) -> "Word":
        return cls(alphabet, alphabet.encode(text))

    def __len__(self):
        return len(self.data)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.alphabet, self.data[item])
        return self.data[item]

    def __iter__(self):
        return iter(self.data)

    def __add__(self, other):
        if isinstance(other, Word):
            other = other.data
        return Word(self.alphabet, self.data + tuple(other))

    def __str__(self):
        return self.alphabet.decode(self.data)


def as_indices(w, alphabet: Alphabet = BINARY) -> tuple[int, ...]:
    """Normalize a Word, glyph string or index sequence to a tuple of indices."""
    if isinstance(w, Word):
        return w.data
    if isinstance(w, str):
        return alphabet.encode(w)
    return tuple(int(a) for a in w)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("weights must be exact rationals (int, Fraction or 'p/q' string), not float")
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class Distribution:
    """Exact probability vector over Σ^ℓ; blocks absent from ``weights`` have mass 0."""

    alphabet: Alphabet
    block_length: int
    weights: Mapping[tuple[int, ...], Fraction]

    @cached_property
    def _marginals(self) -> dict[tuple[int, ...], Fraction]:
        marg: dict[tuple[int, ...], Fraction] = {}
        for block, p in self.weights.items():
            for j in range(self.block_length + 1):
                key = block[:j]
                marg[key] = marg.get(key, Fraction(0)) + p
        return marg

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.block_length == other.block_length
            and dict(self.weights) == dict(other.weights)
        )

    def weight(self, block) -> Fraction:
        return self.weights.get(as_indices(block, self.alphabet), Fraction(0))

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.weights)

    def as_strings(self) -> dict[str, str]:
        return {self.alphabet.decode(b): str(p) for b, p in sorted(self.weights.items())}

    def __repr__(self):
        return f"Distribution(l={self.block_length}, {self.as_strings()})"


def validate_distribution(block_length: int, weights: Mapping, alphabet: Alphabet = BINARY) -> Distribution:
    if block_length < 1:
        raise BadBlockLength(f"block length must be positive, got {block_length}")
    clean: dict[tuple[int, ...], Fraction] = {}
    for key, raw in weights.items():
        block = as_indices(key, alphabet)
        if len(block) != block_length:
            raise BadBlockLength(f"block {key!r} has length {len(block)}, expected {block_length}")
        if any(a < 0 or a >= alphabet.sigma for a in block):
            raise BadBlockLength(f"block {key!r} uses symbols outside the alphabet")
        p = _as_fraction(raw)
        if p < 0:
            raise NegativeWeight(f"block {key!r} has negative weight {p}")
        if p:
            clean[block] = clean.get(block, Fraction(0)) + p
    total = sum(clean.values(), Fraction(0))
    if total != 1:
        raise SumNotOne(total)
    return Distribution(alphabet, block_length, clean)


def uniform_distribution(block_length: int, alphabet: Alphabet = BINARY) -> Distribution:
    p = Fraction(1, alphabet.sigma**block_length)
    return Distribution(alphabet, block_length, {b: p for b in alphabet.blocks(block_length)})


def marginal(dist: Distribution, prefix) -> Fraction:
    """Total mass of the blocks extending ``prefix``."""
    v = as_indices(prefix, dist.alphabet)
    if len(v) > dist.block_length:
        raise PrefixTooLong(f"prefix of length {len(v)} exceeds block length {dist.block_length}")
    return dist._marginals.get(v, Fraction(0))


def conditional_bet(dist: Distribution, context, symbol) -> Fraction:
    v = as_indices(context, dist.alphabet)
    if len(v) >= dist.block_length:
        raise PrefixTooLong(f"context of length {len(v)} leaves no symbol to bet on")
    a = dist.alphabet.index(symbol) if isinstance(symbol, str) else int(symbol)
    denom = marginal(dist, v)
    if denom == 0:
        raise ZeroMarginal(dist.alphabet.decode(v))
    return marginal(dist, v + (a,)) / denom


def conditional_row(dist: Distribution, context) -> tuple[Fraction, ...]:
    return tuple(conditional_bet(dist, context, a) for a in range(dist.alphabet.sigma))


def log2_fraction(q: Fraction) -> float:
    """log2 of a nonnegative rational, safe for huge numerators/denominators."""
    if q < 0:
        raise ValueError("log of a negative number")
    if q == 0:
        return -math.inf
    return math.log2(q.numerator) - math.log2(q.denominator)


@dataclass(frozen=True)
class CapitalLedger:
    """Capital of an induced (product) gale, factored as

        d(w) = σ^{(s-1)·k·|w|} · mantissa

    where the mantissa is the exact product of c0 and the fair-odds bet
    factors σ·β.  At s = 1 the mantissa is the capital itself.
    """

    step_count: int
    s: Fraction
    mantissa: Fraction
    k: int = 1
    sigma: int = 2

    def __post_init__(self):
        if self.mantissa < 0:
            raise ValueError("capital mantissa must be nonnegative")

    @classmethod
    def initial(cls, c0, s, k: int = 1, sigma: int = 2) -> "CapitalLedger":
        return cls(0, Fraction(s), Fraction(c0), k, sigma)

    @property
    def exponent_log2(self) -> float:
        return float(self.s - 1) * self.k * self.step_count * math.log2(self.sigma)

    @property
    def log2_value(self) -> float:
        m = log2_fraction(self.mantissa)
        return m if m == -math.inf else self.exponent_log2 + m

    def value(self) -> float:
        return 2.0 ** self.log2_value

    def advance(self, factors: Sequence[Fraction]) -> "CapitalLedger":
        """Consume one symbol: multiply the mantissa by k fair-odds factors σ·β_i."""
        if len(factors) != self.k:
            raise ValueError(f"expected {self.k} bet factors, got {len(factors)}")
        m = self.mantissa
        for f in factors:
            m *= f
        return CapitalLedger(self.step_count + 1, self.s, m, self.k, self.sigma)

    def __mul__(self, other: "CapitalLedger") -> "CapitalLedger":
        if not isinstance(other, CapitalLedger):
            return NotImplemented
        if (self.step_count, self.s, self.sigma) != (other.step_count, other.s, other.sigma):
            raise ValueError("can only multiply ledgers over the same word and s")
        return CapitalLedger(self.step_count, self.s, self.mantissa * other.mantissa, self.k + other.k, self.sigma)
