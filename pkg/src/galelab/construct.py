"""Gamblers built from block distributions, and gambler transformations.

- ``build_disjoint_gambler``: states Σ^{<ℓ}; conditional bets make the
  cumulative bet on every aligned block equal its probability.
- ``build_sliding_gambler``: ℓ bets per symbol, states remember the last ℓ
  symbols; bet slot i carries the window that started ℓ-i symbols ago.
- ``extend_phase`` and ``replicate_bets``: capital-preserving rewrites.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import Alphabet, Distribution, conditional_row, log2_fraction, marginal
from .entropy import MODES, entropy_profile
from .errors import FloorTooLarge, SmoothingDistortion, ZeroMassBlock
from .gambler import GamblerSpec


@dataclass(frozen=True)
class SmoothingPolicy:
    floor: Fraction
    epsilon_prime: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "floor", Fraction(self.floor))
        object.__setattr__(self, "epsilon_prime", Fraction(self.epsilon_prime))
        if self.floor <= 0 or self.epsilon_prime <= 0:
            raise ValueError("floor and epsilon_prime must be positive")


def empirical_block_distribution(X, block_length: int, mode: str, n: int | None = None,
                                 schedule=None, alphabet=None) -> Distribution:
    """Plug-in block frequencies at the checkpoint where the ℓ-entropy is lowest
    (ties go to the longest prefix)."""
    kw = {} if alphabet is None else {"alphabet": alphabet}
    report = entropy_profile(X, block_length, mode, schedule=schedule, n=n, **kw)
    return report.counts_at_min.to_distribution()


def rationalize_distribution(dist: Distribution, policy: SmoothingPolicy) -> Distribution:
    """Give every block at least ``policy.floor`` mass; the rest is shaved
    proportionally from the blocks already above the floor."""
    sigma, ell = dist.alphabet.sigma, dist.block_length
    floor = policy.floor
    n_blocks = sigma**ell
    if floor * n_blocks > 1:
        raise FloorTooLarge(f"floor {floor} times {n_blocks} blocks exceeds 1")
    blocks = list(dist.alphabet.blocks(ell))
    if all(dist.weights.get(b, 0) >= floor for b in blocks):
        return dist
    low = {b for b in blocks if dist.weights.get(b, 0) < floor}
    while True:
        high_mass = sum((dist.weights[b] for b in blocks if b not in low), Fraction(0))
        scale = (1 - floor * len(low)) / high_mass
        newly_low = {b for b in blocks if b not in low and dist.weights[b] * scale < floor}
        if not newly_low:
            break
        low |= newly_low
    out = {b: floor if b in low else dist.weights[b] * scale for b in blocks}
    for b, p in dist.weights.items():
        if p >= floor and abs(log2_fraction(out[b]) - log2_fraction(p)) >= policy.epsilon_prime:
            raise SmoothingDistortion(
                f"block {dist.alphabet.decode(b)} moved by more than {policy.epsilon_prime} bits; lower the floor"
            )
    return Distribution(dist.alphabet, ell, out)


def _label(alphabet: Alphabet, w) -> str:
    return alphabet.decode(w)


def _words_upto(alphabet: Alphabet, max_len: int):
    for L in range(max_len + 1):
        yield from alphabet.blocks(L)


def _check_positive(dist: Distribution):
    for b in dist.alphabet.blocks(dist.block_length):
        if dist.weights.get(b, 0) <= 0:
            raise ZeroMassBlock(f"block {dist.alphabet.decode(b)} has zero mass; smooth the distribution first")


def _provenance(kind: str, dist: Distribution, **extra) -> dict:
    return {"construction": kind, "block_length": dist.block_length,
            "distribution": dist.as_strings(), **extra}


def build_disjoint_gambler(dist: Distribution, c0=1) -> GamblerSpec:
    _check_positive(dist)
    alphabet, ell, sigma = dist.alphabet, dist.block_length, dist.alphabet.sigma
    words = list(_words_upto(alphabet, ell - 1))
    index = {w: i for i, w in enumerate(words)}
    transitions, bets = [], []
    for w in words:
        transitions.append(tuple(index[w + (a,)] if len(w) < ell - 1 else index[()] for a in range(sigma)))
        bets.append((conditional_row(dist, w),))
    return GamblerSpec(alphabet, tuple(_label(alphabet, w) for w in words), tuple(transitions),
                       tuple(bets), index[()], Fraction(c0), 1, _provenance("disjoint", dist))


def build_sliding_gambler(dist: Distribution, c0=1) -> GamblerSpec:
    """ℓ-bet gambler placing a cumulative bet of ℙ(w) on each sliding window w.

    In a full state u = a_0…a_{ℓ-1}, slot i (1-based) bets the conditional
    row given context a_i…a_{ℓ-1}, so the window starting ℓ-i symbols back
    receives its (ℓ-i+1)-th factor.  While fewer than ℓ symbols have been
    read, a slot whose context is already available bets on it and the others
    bet fair; this way every complete window, including the first, is fully
    bet.
    """
    _check_positive(dist)
    alphabet, ell, sigma = dist.alphabet, dist.block_length, dist.alphabet.sigma
    if ell == 1:
        spec = build_disjoint_gambler(dist, c0)
        return GamblerSpec(spec.alphabet, spec.states, spec.transitions, spec.bets, spec.q0, spec.c0, 1,
                           _provenance("sliding", dist))
    fair = tuple(Fraction(1, sigma) for _ in range(sigma))
    words = list(_words_upto(alphabet, ell))
    index = {w: i for i, w in enumerate(words)}
    transitions, bets = [], []
    for w in words:
        transitions.append(tuple(index[(w + (a,))[-ell:]] for a in range(sigma)))
        rows = []
        for i in range(1, ell + 1):
            ctx_len = ell - i
            rows.append(conditional_row(dist, w[len(w) - ctx_len:]) if ctx_len <= len(w) else fair)
        bets.append(tuple(rows))
    return GamblerSpec(alphabet, tuple(_label(alphabet, w) for w in words), tuple(transitions),
                       tuple(bets), index[()], Fraction(c0), ell, _provenance("sliding", dist))


def sliding_capital_identity(dist: Distribution, x) -> Fraction:
    """Closed form of the sliding gambler's raw bet product on x (|x| >= ℓ):

        Π_{complete windows} ℙ(w) · Π_{open tail windows} ℙ(prefix) · σ^{-ℓ(ℓ-1)/2}

    the last factor being the fair warm-up slots.  Used as a brute-force oracle.
    """
    ell, sigma = dist.block_length, dist.alphabet.sigma
    x = tuple(x)
    n = len(x)
    total = Fraction(1)
    for p in range(n - ell + 1):
        total *= dist.weight(x[p:p + ell])
    for p in range(max(0, n - ell + 1), n):
        total *= marginal(dist, x[p:])
    if ell > 1:
        total /= Fraction(sigma) ** (ell * (ell - 1) // 2)
    return total


def build_gambler(dist: Distribution, mode: str, c0=1) -> GamblerSpec:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return build_disjoint_gambler(dist, c0) if mode == "disjoint" else build_sliding_gambler(dist, c0)


def extend_phase(spec: GamblerSpec, L: int) -> GamblerSpec:
    """Product with a mod-L phase counter; bets ignore the phase."""
    if L < 1:
        raise ValueError("L must be at least 1")
    nq, sigma = len(spec.states), spec.sigma
    states = tuple(f"{q}|{p}" for q in spec.states for p in range(L))

    def idx(q, p):
        return q * L + p

    transitions = tuple(
        tuple(idx(spec.transitions[q][a], (p + 1) % L) for a in range(sigma))
        for q in range(nq) for p in range(L)
    )
    bets = tuple(spec.bets[q] for q in range(nq) for p in range(L))
    prov = dict(spec.provenance, phase_extension=L)
    return GamblerSpec(spec.alphabet, states, transitions, bets, idx(spec.q0, 0), spec.c0, spec.k, prov)


def replicate_bets(spec: GamblerSpec, m: int) -> GamblerSpec:
    """m adjacent copies of every bet row; k becomes k·m and c0 becomes c0^m,
    so the induced capital is the m-th power of the original."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m == 1:
        return spec
    bets = tuple(tuple(itertools.chain.from_iterable([row] * m for row in rows)) for rows in spec.bets)
    prov = dict(spec.provenance, replication=m)
    return GamblerSpec(spec.alphabet, spec.states, spec.transitions, bets, spec.q0, spec.c0**m, spec.k * m, prov)
