"""Finite-state dimension estimates, success diagnostics and the equivalence experiments."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .construct import (
    SmoothingPolicy,
    build_gambler,
    empirical_block_distribution,
    rationalize_distribution,
)
from .core import BINARY, Alphabet, log2_fraction
from .entropy import (
    MODES,
    MAX_BLOCK_LENGTH,
    DimensionEstimate,
    block_entropy,
    count_blocks,
    entropy_profiles,
    estimates_from_reports,
)
from .errors import SBelowEntropy, TooFewCheckpoints
from .gambler import Trajectory, final_log2_capital
from .seqgen import as_stream

DEFAULT_SLOPE_THRESHOLD = 0.01
MIN_CHECKPOINTS = 10


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("GALELAB_THREADS", "2")))
    except ValueError:
        return 1


def estimate_fs_dimension(X, L_max: int, mode: str, n: int | None = None,
                          alphabet: Alphabet = BINARY) -> DimensionEstimate:
    if not 1 <= L_max <= MAX_BLOCK_LENGTH:
        raise ValueError(f"L_max must be in 1..{MAX_BLOCK_LENGTH}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    stream = as_stream(X, alphabet)
    n = stream.length if n is None else n
    if n is None or n < L_max:
        raise ValueError("n must be known and at least L_max")
    ls = list(range(1, L_max + 1))
    reports = entropy_profiles(stream, ls, [mode], n=n)
    n_used = max(r.checkpoints[-1][0] for r in reports.values())
    return estimates_from_reports(reports, [mode], ls, n_used)[mode]


@dataclass
class SuccessReport:
    s: Fraction
    max_log2_capital: float
    tail_slope: float
    verdict: str
    final_log2_capital: float
    slope_threshold: float

    def to_dict(self) -> dict:
        return {
            "s": str(self.s),
            "max_log2_capital": self.max_log2_capital,
            "final_log2_capital": self.final_log2_capital,
            "tail_slope": self.tail_slope,
            "slope_threshold": self.slope_threshold,
            "verdict": self.verdict,
        }


def success_diagnostic(trajectory: Trajectory, slope_threshold: float = DEFAULT_SLOPE_THRESHOLD) -> SuccessReport:
    """Least-squares drift of log2 capital over the trailing half of the checkpoints."""
    x = np.asarray(trajectory.prefix_lengths, dtype=np.float64)
    y = np.asarray(trajectory.log2_capital, dtype=np.float64)
    if len(x) < MIN_CHECKPOINTS:
        raise TooFewCheckpoints(f"need at least {MIN_CHECKPOINTS} checkpoints, got {len(x)}")
    tail = slice(len(x) // 2, None)
    tx, ty = x[tail], y[tail]
    if np.isneginf(ty).any():
        slope = -math.inf
    else:
        slope = float(np.polyfit(tx, ty, 1)[0])
    top = float(np.max(y))
    if slope > slope_threshold and top > 0:
        verdict = "winning"
    elif slope < -slope_threshold:
        verdict = "losing"
    else:
        verdict = "indeterminate"
    return SuccessReport(trajectory.s, top, slope, verdict, float(y[-1]), slope_threshold)


def even_checkpoints(n: int, count: int = 100) -> np.ndarray:
    return np.unique(np.linspace(0, n, count + 1).round().astype(np.int64))


@dataclass
class GaleWinCertificate:
    mode: str
    block_length: int
    s: Fraction
    n_used: int
    observed_entropy: float
    direct_log2: float
    formula_log2: float
    discrepancy: float
    tolerance: float
    passed: bool
    spec: object = field(repr=False, default=None)
    distribution: object = field(repr=False, default=None)

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "block_length": self.block_length,
            "s": str(self.s),
            "n_used": self.n_used,
            "observed_entropy": self.observed_entropy,
            "direct_log2_capital": self.direct_log2,
            "formula_log2_capital": self.formula_log2,
            "discrepancy": self.discrepancy,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        if self.spec is not None:
            d["gambler"] = self.spec.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def default_floor(block_length: int, sigma: int, windows: int) -> Fraction:
    """Floor well below one observation's mass and below 1/σ^ℓ."""
    return Fraction(1, 4 * max(windows, 1) * sigma**block_length)


def prepare_gambler(data, block_length: int, mode: str, floor=None, alphabet: Alphabet = BINARY,
                    epsilon_prime=Fraction(1, 4)):
    """Empirical ℙ (at the running-min checkpoint), smoothed, and the matching gambler."""
    dist = empirical_block_distribution(data, block_length, mode, alphabet=alphabet)
    if floor is None:
        floor = default_floor(block_length, alphabet.sigma, len(data))
    dist = rationalize_distribution(dist, SmoothingPolicy(Fraction(floor), Fraction(epsilon_prime)))
    return dist, build_gambler(dist, mode)


def gale_win_certificate(X, s, block_length: int, mode: str, n: int | None = None,
                         alphabet: Alphabet = BINARY, floor=None, tolerance: float = 1e-6) -> GaleWinCertificate:
    """Run the constructed gambler on the prefix and compare its log2 capital with
    the block-count closed form.

    disjoint: log2 d(X↾kℓ) = k·(sℓ + Σ_w P(w)·log2 ℙ(w)), checked to ``tolerance``.
    sliding:  the raw bet product differs from Σ_{windows} log2 ℙ(w) only by
              boundary terms, bounded by 2ℓ·max_w |log2 ℙ(w)|.
    Passing also requires the capital to have grown (log2 d > 0).
    """
    s = Fraction(s)
    stream = as_stream(X, alphabet)
    alphabet = stream.alphabet
    data = stream.take(n)
    ell, sigma = block_length, alphabet.sigma
    if mode == "disjoint":
        data = data[: len(data) - len(data) % ell]
    counts = count_blocks(data.tolist(), ell, mode, alphabet)
    h = block_entropy(counts)
    if s <= h:
        raise SBelowEntropy(f"s = {float(s):.4f} is not above the observed H_{ell} = {h:.4f}")
    dist, spec = prepare_gambler(data, ell, mode, floor, alphabet)
    direct = final_log2_capital(spec, s, data)
    logP = {b: log2_fraction(p) for b, p in dist.weights.items()}
    window_sum = math.fsum(c * logP[b] for b, c in counts.counts.items())
    if mode == "disjoint":
        k = counts.window_total
        formula = math.fsum([k * float(s) * ell * math.log2(sigma), window_sum])
        discrepancy = abs(direct - formula)
        tol = tolerance
    else:
        # compare s-free raw bet products; σ-normalization removed
        raw = direct - float(s) * spec.k * len(data) * math.log2(sigma)
        formula = math.fsum([float(s) * ell * len(data) * math.log2(sigma), window_sum])
        discrepancy = abs(raw - window_sum)
        tol = 2 * ell * max(abs(v) for v in logP.values())
    passed = discrepancy <= tol and direct > 0
    return GaleWinCertificate(mode, ell, s, len(data), h, direct, formula, discrepancy, tol, passed, spec, dist)


@dataclass
class EquivalenceReport:
    per_l: dict[int, dict[str, float]]
    disjoint_estimate: float
    sliding_estimate: float
    max_per_l_gap: float
    n_used: int

    @property
    def estimate_gap(self) -> float:
        return abs(self.disjoint_estimate - self.sliding_estimate)

    def to_dict(self) -> dict:
        return {
            "n_used": self.n_used,
            "disjoint_estimate": self.disjoint_estimate,
            "sliding_estimate": self.sliding_estimate,
            "estimate_gap": self.estimate_gap,
            "max_per_l_gap": self.max_per_l_gap,
            "per_l": {str(k): v for k, v in sorted(self.per_l.items())},
        }

    def to_csv(self) -> str:
        lines = ["l,disjoint,sliding,gap"]
        for ell, row in sorted(self.per_l.items()):
            lines.append(f"{ell},{row['disjoint']!r},{row['sliding']!r},{row['gap']!r}")
        return "\n".join(lines) + "\n"


def equivalence_experiment(X, L_max: int, n: int | None = None, alphabet: Alphabet = BINARY) -> EquivalenceReport:
    stream = as_stream(X, alphabet)
    n = stream.length if n is None else n
    if thread_cap() > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            futs = {m: pool.submit(estimate_fs_dimension, stream, L_max, m, n) for m in MODES}
            est = {m: f.result() for m, f in futs.items()}
    else:
        est = {m: estimate_fs_dimension(stream, L_max, m, n) for m in MODES}
    per_l = {}
    for ell in range(1, L_max + 1):
        d, s_ = est["disjoint"].per_l[ell], est["sliding"].per_l[ell]
        per_l[ell] = {"disjoint": d, "sliding": s_, "gap": abs(d - s_)}
    return EquivalenceReport(
        per_l,
        est["disjoint"].estimate,
        est["sliding"].estimate,
        max(r["gap"] for r in per_l.values()),
        max(e.n_used for e in est.values()),
    )
