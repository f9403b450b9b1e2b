"""Gale oracles, the gale / root-supergale / Kraft checkers, and prefix-cover extraction.

The product-gale checkers work on binary alphabets only.  k-th roots are
taken in the log domain, log2 d^{1/k} = log2(d)/k, and inequalities are
accepted within ``tol`` bits.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from .core import BINARY, Alphabet, CapitalLedger, as_indices
from .errors import DepthTooLarge, NotAntichain, NotSingleFactor, ThresholdNeverReached

LOG_TOL = 1e-9
MAX_ENUM_DEPTH = 4


class GaleOracle:
    """A (product) gale given by an evaluation function on words."""

    def __init__(self, evaluate: Callable, s, k_factors: int = 1, alphabet: Alphabet = BINARY):
        self._evaluate = evaluate
        self.s = Fraction(s)
        self.k_factors = k_factors
        self.alphabet = alphabet
        self._cache: dict[tuple[int, ...], CapitalLedger] = {}

    @property
    def sigma(self) -> int:
        return self.alphabet.sigma

    def evaluate(self, w) -> CapitalLedger:
        key = as_indices(w, self.alphabet)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._evaluate(key)
        return hit

    def log2(self, w) -> float:
        return self.evaluate(w).log2_value


class GamblerOracle(GaleOracle):
    """The gale induced by a GamblerSpec, evaluated by memoized prefix recursion."""

    def __init__(self, spec, s):
        super().__init__(None, s, spec.k, spec.alphabet)
        self.spec = spec
        self._states: dict[tuple[int, ...], int] = {(): spec.q0}
        self._cache[()] = CapitalLedger.initial(spec.c0, self.s, spec.k, spec.sigma)

    def evaluate(self, w) -> CapitalLedger:
        key = as_indices(w, self.alphabet)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        parent = self.evaluate(key[:-1])
        q = self._states[key[:-1]]
        a = key[-1]
        ledger = parent.advance(self.spec.factors(q, a))
        self._states[key] = self.spec.transitions[q][a]
        self._cache[key] = ledger
        return ledger


def product_oracle(oracles) -> GaleOracle:
    """Pointwise product d = d_1·…·d_k of gales sharing s and alphabet."""
    oracles = list(oracles)
    s = oracles[0].s
    if any(o.s != s or o.alphabet != oracles[0].alphabet for o in oracles):
        raise ValueError("product factors must share s and alphabet")

    def evaluate(w):
        ledger = oracles[0].evaluate(w)
        for o in oracles[1:]:
            ledger = ledger * o.evaluate(w)
        return ledger

    return GaleOracle(evaluate, s, sum(o.k_factors for o in oracles), oracles[0].alphabet)


def _mantissa(oracle, w):
    return oracle.evaluate(w).mantissa


def check_gale_condition(oracle: GaleOracle, w, tol: float | None = None) -> bool:
    """mantissa(w) == (1/σ)·Σ_a mantissa(wa); exact for rational mantissas."""
    if oracle.k_factors != 1:
        raise NotSingleFactor(f"gale condition needs a single factor, oracle has {oracle.k_factors}")
    w = as_indices(w, oracle.alphabet)
    here = _mantissa(oracle, w)
    children = [_mantissa(oracle, w + (a,)) for a in range(oracle.sigma)]
    if all(isinstance(m, (int, Fraction)) for m in [here, *children]):
        return Fraction(here) == Fraction(sum(children, Fraction(0)), oracle.sigma)
    avg = math.fsum(float(m) for m in children) / oracle.sigma
    return math.isclose(float(here), avg, rel_tol=0, abs_tol=LOG_TOL if tol is None else tol)


def _log2_sum(terms: Iterable[float]) -> float:
    terms = [t for t in terms if t != -math.inf]
    if not terms:
        return -math.inf
    top = max(terms)
    return top + math.log2(math.fsum(2.0 ** (t - top) for t in terms))


def _leq(lhs: float, rhs: float, tol: float) -> bool:
    if lhs == -math.inf:
        return True
    return lhs <= rhs + tol


def _require_binary(oracle):
    if oracle.sigma != 2:
        raise ValueError("product-gale checkers are defined for binary alphabets only")


def check_root_supergale(oracle: GaleOracle, w, tol: float = LOG_TOL) -> bool:
    """d(w0)^{1/k} + d(w1)^{1/k} <= 2^s · d(w)^{1/k}, in log2."""
    _require_binary(oracle)
    w = as_indices(w, oracle.alphabet)
    k = oracle.k_factors
    lhs = _log2_sum(oracle.log2(w + (a,)) / k for a in (0, 1))
    here = oracle.log2(w)
    rhs = float(oracle.s) + (here / k if here != -math.inf else -math.inf)
    return _leq(lhs, rhs, tol)


@dataclass(frozen=True)
class PrefixSet:
    members: frozenset

    def __post_init__(self):
        members = frozenset(tuple(m) for m in self.members)
        object.__setattr__(self, "members", members)
        if not is_antichain(members):
            raise NotAntichain("some member is a proper prefix of another")

    @classmethod
    def of(cls, words, alphabet: Alphabet = BINARY) -> "PrefixSet":
        return cls(frozenset(as_indices(w, alphabet) for w in words))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members, key=lambda m: (len(m), m)))

    def strings(self, alphabet: Alphabet = BINARY) -> list[str]:
        return [alphabet.decode(m) for m in self]


def is_antichain(words) -> bool:
    words = set(words)
    for u in words:
        for j in range(len(u)):
            if u[:j] in words:
                return False
    return True


def count_prefix_sets(depth: int) -> int:
    f = 2
    for _ in range(depth):
        f = f * f + 1
    return f


def _antichains(depth: int) -> list[frozenset]:
    if depth == 0:
        return [frozenset(), frozenset({()})]
    sub = _antichains(depth - 1)
    out = [frozenset({()})]
    for left in sub:
        for right in sub:
            out.append(frozenset({(0,) + u for u in left} | {(1,) + u for u in right}))
    return out


def enumerate_prefix_sets(max_depth: int) -> Iterator[PrefixSet]:
    """Every antichain of {0,1}^{<=max_depth}: empty, {λ}, or one antichain per subtree."""
    if max_depth > MAX_ENUM_DEPTH:
        raise DepthTooLarge(f"depth {max_depth} exceeds the enumeration cap {MAX_ENUM_DEPTH}")
    if max_depth < 0:
        raise ValueError("depth must be nonnegative")
    for members in _antichains(max_depth):
        yield PrefixSet(members)


def check_kraft_inequality(oracle: GaleOracle, w, B, tol: float = LOG_TOL) -> bool:
    """Σ_{u∈B} 2^{-s|u|} d(wu)^{1/k} <= d(w)^{1/k}, in log2."""
    _require_binary(oracle)
    if not isinstance(B, PrefixSet):
        B = PrefixSet.of(B, oracle.alphabet)
    w = as_indices(w, oracle.alphabet)
    k, s = oracle.k_factors, float(oracle.s)
    terms = []
    for u in B.members:
        v = oracle.log2(w + u)
        if v != -math.inf:
            terms.append(-s * len(u) + v / k)
    here = oracle.log2(w)
    return _leq(_log2_sum(terms), here / k if here != -math.inf else -math.inf, tol)


@dataclass
class CoverCertificate:
    members: PrefixSet
    kraft_sum: float
    bound: float
    n_target: int
    threshold_log2: float
    s: Fraction
    max_depth: int
    uncovered_mass: float = 0.0
    uncovered_words: int = 0
    depths: list[int] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.kraft_sum <= self.bound

    @property
    def exhaustive(self) -> bool:
        """True when every live branch was resolved within max_depth."""
        return self.uncovered_words == 0

    def to_dict(self, alphabet: Alphabet = BINARY) -> dict:
        return {
            "members": self.members.strings(alphabet),
            "kraft_sum": format(self.kraft_sum, ".17g"),
            "bound": format(self.bound, ".17g"),
            "valid": self.valid,
            "n_target": self.n_target,
            "s": str(self.s),
            "threshold_log2": format(self.threshold_log2, ".17g"),
            "max_depth": self.max_depth,
            "depths": self.depths,
            "uncovered_mass": format(self.uncovered_mass, ".17g"),
            "uncovered_words": self.uncovered_words,
            "exhaustive": self.exhaustive,
        }

    def to_json(self, alphabet: Alphabet = BINARY) -> str:
        return json.dumps(self.to_dict(alphabet), indent=2)


def extract_cover(oracle: GaleOracle, n_target: int, depth: int, max_depth: int) -> CoverCertificate:
    """Breadth-first search for the minimal words whose capital reaches 2^{n·k}·a_depth,
    a_depth = 1 + max{d(w) : |w| <= depth}.

    Branches with zero capital are dropped; live words still below threshold at
    max_depth are reported as uncovered (Lebesgue mass Σ σ^{-|w|}).
    """
    _require_binary(oracle)
    if abs(oracle.log2(())) > LOG_TOL:
        raise ValueError("extract_cover expects an oracle normalized to d(λ) = 1")
    k, s, sigma = oracle.k_factors, float(oracle.s), oracle.sigma
    top = max(oracle.log2(w) for L in range(depth + 1) for w in _words(L, sigma))
    log2_a = math.log2(1.0 + 2.0 ** top) if top != -math.inf else 0.0
    threshold = n_target * k + log2_a

    found: list[tuple[int, ...]] = []
    uncovered_mass, uncovered = 0.0, 0
    queue = deque([()])
    while queue:
        w = queue.popleft()
        v = oracle.log2(w)
        if v >= threshold:
            found.append(w)
        elif v == -math.inf:
            continue
        elif len(w) >= max_depth:
            uncovered += 1
            uncovered_mass += sigma ** -len(w)
        else:
            queue.extend(w + (a,) for a in range(sigma))
    if not found:
        raise ThresholdNeverReached(
            f"no word of length <= {max_depth} reaches capital 2^{threshold:.3f}"
        )
    cover = PrefixSet(frozenset(found))
    kraft = math.fsum(sigma ** (-s * len(w)) for w in found)
    return CoverCertificate(cover, kraft, 2.0 ** -n_target, n_target, threshold, oracle.s, max_depth,
                            uncovered_mass, uncovered, sorted(len(w) for w in found))


def _words(length: int, sigma: int):
    if length == 0:
        yield ()
        return
    for w in _words(length - 1, sigma):
        for a in range(sigma):
            yield w + (a,)
