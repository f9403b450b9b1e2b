"""Randomized and exhaustive verification suites behind ``galelab verify``."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .construct import build_disjoint_gambler
from .core import BINARY, Distribution, log2_fraction
from .entropy import count_disjoint
from .errors import ThresholdNeverReached
from .gale import (
    check_gale_condition,
    check_kraft_inequality,
    check_root_supergale,
    enumerate_prefix_sets,
    extract_cover,
    product_oracle,
)
from .gambler import cumulative_block_bet, final_log2_capital, induced_oracle, random_gambler
from .seqgen import GeneratorConfig, generate

SUITES = ("gale", "root", "kraft", "cover", "construct")
S_CHOICES = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(3, 2), Fraction(2)]


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    skipped: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, **info):
        self.failures.append(info)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checked": self.checked,
                "skipped": self.skipped, "failures": self.failures[:20]}


def words_upto(max_len: int):
    for L in range(max_len + 1):
        yield from itertools.product((0, 1), repeat=L)


def random_word(rng: random.Random, max_len: int) -> tuple[int, ...]:
    return tuple(rng.randint(0, 1) for _ in range(rng.randint(0, max_len)))


def random_product_gale(rng: random.Random, k: int, s, allow_extremes: bool = True):
    return product_oracle(
        induced_oracle(random_gambler(rng, rng.randint(1, 6), 1, allow_extremes=allow_extremes), s)
        for _ in range(k)
    )


def random_positive_distribution(rng: random.Random, block_length: int, denominator: int = 64) -> Distribution:
    raw = {b: Fraction(rng.randint(1, denominator)) for b in itertools.product((0, 1), repeat=block_length)}
    total = sum(raw.values())
    return Distribution(BINARY, block_length, {b: p / total for b, p in raw.items()})


def suite_gale(trials: int, seed: int, spec=None, max_len: int = 6) -> SuiteResult:
    res = SuiteResult("gale")
    rng = random.Random(seed)
    specs = [spec] if spec is not None else [
        random_gambler(rng, rng.randint(1, 8), 1) for _ in range(trials)
    ]
    for sp in specs:
        oracle = induced_oracle(sp, 1)
        for w in words_upto(max_len):
            res.checked += 1
            if not check_gale_condition(oracle, w):
                res.fail(word=BINARY.decode(w), mantissa=str(oracle.evaluate(w).mantissa),
                         children=[str(oracle.evaluate(w + (a,)).mantissa) for a in (0, 1)])
                break
    return res


def suite_root(trials: int, seed: int, words_per_gale: int = 100, max_len: int = 8) -> SuiteResult:
    res = SuiteResult("root")
    rng = random.Random(seed)
    remaining = trials
    while remaining > 0:
        k = rng.randint(1, 4)
        s = rng.choice(S_CHOICES)
        oracle = induced_oracle(random_gambler(rng, rng.randint(1, 8), k), s)
        for _ in range(min(words_per_gale, remaining)):
            w = random_word(rng, max_len)
            res.checked += 1
            if not check_root_supergale(oracle, w):
                res.fail(word=BINARY.decode(w), k=k, s=str(s))
        remaining -= words_per_gale
    return res


def suite_kraft(trials: int, seed: int, depth: int = 3, anchor_len: int = 2) -> SuiteResult:
    res = SuiteResult("kraft")
    rng = random.Random(seed)
    prefix_sets = list(enumerate_prefix_sets(depth))
    anchors = list(words_upto(anchor_len))
    oracle = None
    for t in range(trials):
        if t % 50 == 0:
            k = rng.randint(1, 4)
            s = rng.choice(S_CHOICES)
            oracle = random_product_gale(rng, k, s)
        w = rng.choice(anchors)
        B = rng.choice(prefix_sets)
        res.checked += 1
        if not check_kraft_inequality(oracle, w, B):
            res.fail(anchor=BINARY.decode(w), prefix_set=B.strings(), k=oracle.k_factors, s=str(oracle.s))
    return res


def suite_cover(trials: int, seed: int, n_target: int = 2, depth: int = 1, max_depth: int = 12) -> SuiteResult:
    res = SuiteResult("cover")
    rng = random.Random(seed)
    for _ in range(trials):
        k = rng.randint(1, 3)
        oracle = random_product_gale(rng, k, 1, allow_extremes=False)
        try:
            cert = extract_cover(oracle, n_target, depth, max_depth)
        except ThresholdNeverReached:
            res.skipped += 1
            continue
        res.checked += 1
        if not cert.valid:
            res.fail(kraft_sum=cert.kraft_sum, bound=cert.bound, members=cert.members.strings())
    return res


def construct_identity_gap(dist: Distribution, s, data) -> float:
    """|direct log2 capital − k(sℓ + Σ_w P(w) log2 ℙ(w))| on the aligned prefix."""
    ell = dist.block_length
    data = np.asarray(data)[: len(data) - len(data) % ell]
    spec = build_disjoint_gambler(dist)
    direct = final_log2_capital(spec, s, data)
    counts = count_disjoint(tuple(data.tolist()), ell)
    k = counts.window_total
    formula = math.fsum([k * float(s) * ell] + [c * log2_fraction(dist.weights[b]) for b, c in counts.counts.items()])
    return abs(direct - formula)


def suite_construct(trials: int, seed: int, n: int = 10_000, max_block: int = 5) -> SuiteResult:
    res = SuiteResult("construct")
    rng = random.Random(seed)
    for t in range(trials):
        ell = rng.randint(1, max_block)
        dist = random_positive_distribution(rng, ell)
        spec = build_disjoint_gambler(dist)
        for b in itertools.product((0, 1), repeat=ell):
            res.checked += 1
            if cumulative_block_bet(spec, spec.q0, b) != dist.weights[b]:
                res.fail(check="cumulative_bet", block=BINARY.decode(b))
        bias = Fraction(rng.randint(1, 15), 16)
        data = generate(GeneratorConfig("bernoulli", n, bias=bias, seed=seed * 1000 + t)).take()
        s = rng.choice(S_CHOICES)
        gap = construct_identity_gap(dist, s, data)
        res.checked += 1
        if not gap <= 1e-6:
            res.fail(check="log_capital_identity", block_length=ell, gap=gap)
    return res


def run_suite(name: str, trials: int, seed: int, spec=None) -> SuiteResult:
    if name == "gale":
        return suite_gale(trials, seed, spec)
    if name == "root":
        return suite_root(trials, seed)
    if name == "kraft":
        return suite_kraft(trials, seed)
    if name == "cover":
        return suite_cover(trials, seed)
    if name == "construct":
        return suite_construct(trials, seed)
    raise ValueError(f"unknown suite {name!r}")
