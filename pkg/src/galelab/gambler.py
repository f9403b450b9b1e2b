"""k-bet finite-state gamblers and the product gales they induce.

A gambler in state q places k bets; bet i is a probability row over the next
symbol.  On reading symbol a the capital is multiplied by

    Π_i σ^s · row_i(q)[a]  =  σ^{(s-1)k} · Π_i σ·row_i(q)[a]

so the exact part of a ledger (the mantissa) only ever sees the fair-odds
factors σ·row_i(q)[a].  With σ = 2 and k = 1 this is the usual recursion
d(wb) = 2^s d(w) [(1-b)(1-β) + bβ].
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .core import BINARY, Alphabet, CapitalLedger, Word, as_indices, log2_fraction
from .errors import MissingTransition, RowNotStochastic, UnknownStartState


@dataclass(frozen=True, eq=False)
class GamblerSpec:
    alphabet: Alphabet
    states: tuple[str, ...]
    transitions: tuple[tuple[int, ...], ...]  # [state][symbol] -> state
    bets: tuple[tuple[tuple[Fraction, ...], ...], ...]  # [state][bet][symbol]
    q0: int = 0
    c0: Fraction = Fraction(1)
    k: int = 1
    provenance: Mapping = field(default_factory=dict)

    @property
    def sigma(self) -> int:
        return self.alphabet.sigma

    def state_index(self, label: str) -> int:
        return self.states.index(label)

    def step(self, q: int, a: int) -> int:
        return self.transitions[q][a]

    def delta_star(self, q: int, word) -> int:
        for a in as_indices(word, self.alphabet):
            q = self.transitions[q][a]
        return q

    def factors(self, q: int, a: int) -> tuple[Fraction, ...]:
        """Fair-odds factors σ·row_i(q)[a] for the k bets."""
        return tuple(self.sigma * row[a] for row in self.bets[q])

    def same_as(self, other: "GamblerSpec") -> bool:
        return (
            self.alphabet == other.alphabet
            and self.states == other.states
            and self.transitions == other.transitions
            and self.bets == other.bets
            and (self.q0, self.c0, self.k) == (other.q0, other.c0, other.k)
        )

    @property
    def log_factor_table(self) -> np.ndarray:
        """log2 Π_i σ·row_i(q)[a] as a float array [state, symbol]; -inf for a zero bet."""
        cached = self.__dict__.get("_log_table")
        if cached is None:
            cached = np.empty((len(self.states), self.sigma))
            for q, rows in enumerate(self.bets):
                for a in range(self.sigma):
                    cached[q, a] = math.fsum(log2_fraction(self.sigma * r[a]) for r in rows) \
                        if all(r[a] for r in rows) else -math.inf
            self.__dict__["_log_table"] = cached
        return cached

    def to_dict(self) -> dict:
        glyphs = self.alphabet.symbols
        d = {
            "alphabet": list(glyphs),
            "k": self.k,
            "states": list(self.states),
            "q0": self.states[self.q0],
            "c0": str(self.c0),
            "delta": {
                f"{self.states[q]},{glyphs[a]}": self.states[t]
                for q, row in enumerate(self.transitions)
                for a, t in enumerate(row)
            },
            "beta": {
                self.states[q]: [[str(p) for p in r] for r in rows]
                for q, rows in enumerate(self.bets)
            },
        }
        if self.provenance:
            d["provenance"] = dict(self.provenance)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=kw.pop("indent", 2), **kw)


def validate_gambler(raw: Mapping, check_rows: bool = True) -> GamblerSpec:
    """Build a GamblerSpec from the JSON interchange form.

    ``check_rows=False`` admits non-stochastic rows; the gale verifier uses it
    to inspect tampered specs.
    """
    alphabet = Alphabet(tuple(raw.get("alphabet", BINARY.symbols)))
    k = int(raw.get("k", 1))
    if k < 1:
        raise ValueError("k must be at least 1")
    states = tuple(str(q) for q in raw["states"])
    if len(set(states)) != len(states) or not states:
        raise ValueError("states must be a nonempty list of distinct labels")
    index = {q: i for i, q in enumerate(states)}
    if raw.get("q0") not in index:
        raise UnknownStartState(f"start state {raw.get('q0')!r} is not a declared state")
    c0 = Fraction(raw.get("c0", 1))
    if c0 < 0:
        raise ValueError("initial capital must be nonnegative")

    delta_raw = raw["delta"]
    table = {}
    for key, target in delta_raw.items():
        if isinstance(key, str):
            q, _, g = key.rpartition(",")
        else:
            q, g = key
            g = alphabet.symbols[g] if isinstance(g, int) else g
        if q not in index or g not in alphabet.symbols:
            raise ValueError(f"transition key {key!r} names an unknown state or symbol")
        if target not in index:
            raise ValueError(f"transition {key!r} targets unknown state {target!r}")
        table[(index[q], alphabet.index(g))] = index[target]
    transitions = []
    for qi, q in enumerate(states):
        row = []
        for a, g in enumerate(alphabet.symbols):
            if (qi, a) not in table:
                raise MissingTransition(q, g)
            row.append(table[(qi, a)])
        transitions.append(tuple(row))

    beta_raw = raw["beta"]
    bets = []
    for q in states:
        if q not in beta_raw:
            raise ValueError(f"no bets for state {q!r}")
        rows = beta_raw[q]
        if len(rows) != k:
            raise ValueError(f"state {q!r} has {len(rows)} bet rows, expected k={k}")
        clean_rows = []
        for r in rows:
            r = tuple(Fraction(p) for p in r)
            if len(r) != alphabet.sigma:
                raise RowNotStochastic(q, [str(p) for p in r])
            if check_rows and (sum(r) != 1 or any(p < 0 for p in r)):
                raise RowNotStochastic(q, [str(p) for p in r])
            clean_rows.append(r)
        bets.append(tuple(clean_rows))
    return GamblerSpec(alphabet, states, tuple(transitions), tuple(bets), index[raw["q0"]], c0, k,
                       dict(raw.get("provenance", {})))


def load_gambler(path, check_rows: bool = True) -> GamblerSpec:
    with open(path) as fh:
        return validate_gambler(json.load(fh), check_rows=check_rows)


def make_gambler(alphabet: Alphabet, states: Sequence[str], delta: Mapping, beta: Mapping,
                 q0: str, c0=1, provenance=None) -> GamblerSpec:
    """Convenience builder: delta maps (state, symbol index) -> state, beta maps state -> rows."""
    rows0 = next(iter(beta.values()))
    raw = {
        "alphabet": list(alphabet.symbols),
        "k": len(rows0),
        "states": list(states),
        "q0": q0,
        "c0": c0,
        "delta": {f"{q},{alphabet.symbols[a]}": t for (q, a), t in delta.items()},
        "beta": {q: [list(r) for r in rows] for q, rows in beta.items()},
        "provenance": provenance or {},
    }
    return validate_gambler(raw)


def constant_gambler(row, k: int = 1, alphabet: Alphabet = BINARY, c0=1) -> GamblerSpec:
    """One state betting ``row`` on every bet slot."""
    row = tuple(Fraction(p) for p in row)
    return make_gambler(alphabet, ["q"], {("q", a): "q" for a in range(alphabet.sigma)},
                        {"q": [row] * k}, "q", c0)


def random_gambler(rng: random.Random, n_states: int = 4, k: int = 1, alphabet: Alphabet = BINARY,
                   denominator: int = 16, c0=1, allow_extremes: bool = True) -> GamblerSpec:
    """Random automaton with random rational bet rows (entries multiples of 1/denominator)."""
    sigma = alphabet.sigma
    states = [f"q{i}" for i in range(n_states)]
    delta = {(q, a): rng.choice(states) for q in states for a in range(sigma)}
    lo = 0 if allow_extremes else 1

    def row():
        while True:
            cuts = sorted(rng.randint(lo, denominator - lo) for _ in range(sigma - 1))
            parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator])]
            if allow_extremes or all(parts):
                return tuple(Fraction(p, denominator) for p in parts)

    beta = {q: [row() for _ in range(k)] for q in states}
    return make_gambler(alphabet, states, delta, beta, states[0], c0)


@dataclass
class Trajectory:
    prefix_lengths: np.ndarray
    log2_capital: np.ndarray
    final_state: int
    s: Fraction
    ledgers: list[CapitalLedger] | None = None

    def to_csv(self) -> str:
        lines = ["prefix_len,log2_capital"]
        lines += [f"{n},{v!r}" for n, v in zip(self.prefix_lengths.tolist(), self.log2_capital.tolist())]
        return "\n".join(lines) + "\n"

    @property
    def final(self) -> CapitalLedger | None:
        return self.ledgers[-1] if self.ledgers else None


def run(spec: GamblerSpec, s, x, checkpoints=None) -> Trajectory:
    """Exact evaluation: a CapitalLedger after every symbol (or at ``checkpoints``)."""
    s = Fraction(s)
    data = as_indices(x, spec.alphabet)
    keep = None if checkpoints is None else set(int(c) for c in checkpoints) | {0, len(data)}
    ledger = CapitalLedger.initial(spec.c0, s, spec.k, spec.sigma)
    q = spec.q0
    ledgers, lengths = [ledger], [0]
    for t, a in enumerate(data, start=1):
        ledger = ledger.advance(spec.factors(q, a))
        q = spec.transitions[q][a]
        if keep is None or t in keep:
            ledgers.append(ledger)
            lengths.append(t)
    return Trajectory(np.asarray(lengths), np.asarray([L.log2_value for L in ledgers]), q, s, ledgers)


def state_sequence(spec: GamblerSpec, data) -> np.ndarray:
    """States occupied before each symbol (length n) for a symbol index array."""
    T = [list(r) for r in spec.transitions]
    out = np.empty(len(data), dtype=np.int64)
    q = spec.q0
    for t, a in enumerate(np.asarray(data).tolist()):
        out[t] = q
        q = T[q][a]
    return out


def log_factors(spec: GamblerSpec, data) -> tuple[np.ndarray, int]:
    """Per-symbol log2 of the fair-odds bet product, plus the final state."""
    data = np.asarray(data, dtype=np.int64)
    qs = state_sequence(spec, data)
    final = spec.transitions[int(qs[-1])][int(data[-1])] if len(data) else spec.q0
    return spec.log_factor_table[qs, data], final


def run_log2(spec: GamblerSpec, s, x, checkpoints=None) -> Trajectory:
    """Float evaluation in the log domain for long inputs; same capital as ``run``."""
    s = Fraction(s)
    data = np.asarray(as_indices(x, spec.alphabet) if isinstance(x, (str, Word)) else x, dtype=np.int64)
    lf, final = log_factors(spec, data)
    with np.errstate(invalid="ignore"):
        cum = np.concatenate([[0.0], np.cumsum(lf)])
    n = len(data)
    idx = np.arange(n + 1) if checkpoints is None else np.unique(np.clip(np.r_[0, np.asarray(checkpoints, dtype=np.int64), n], 0, n))
    drift = float(s - 1) * spec.k * math.log2(spec.sigma)
    values = log2_fraction(spec.c0) + drift * idx + cum[idx]
    # once ruined, always ruined (cumsum of -inf may produce nan after inf-inf)
    values = np.where(np.isnan(values), -np.inf, values)
    return Trajectory(idx, values, final, s)


def final_log2_capital(spec: GamblerSpec, s, data) -> float:
    """Correctly rounded log2 d(x) via an exact-rounding sum of the per-symbol factors."""
    data = np.asarray(data, dtype=np.int64)
    lf, _ = log_factors(spec, data)
    if np.isneginf(lf).any() or spec.c0 == 0:
        return -math.inf
    drift = float(Fraction(s) - 1) * spec.k * math.log2(spec.sigma) * len(data)
    return math.fsum([log2_fraction(spec.c0), drift, math.fsum(lf.tolist())])


def cumulative_block_bet(spec: GamblerSpec, q, x, bet_index: int | None = None) -> Fraction:
    """Product of the bets placed on block x starting at state q (raw bets, no σ factor).

    ``bet_index`` selects one bet slot; ``None`` multiplies all k slots.
    """
    if isinstance(q, str):
        q = spec.state_index(q)
    total = Fraction(1)
    for a in as_indices(x, spec.alphabet):
        rows = spec.bets[q] if bet_index is None else (spec.bets[q][bet_index],)
        for r in rows:
            total *= r[a]
        q = spec.transitions[q][a]
    return total


def project_bet(spec: GamblerSpec, i: int) -> GamblerSpec:
    """The single-bet gambler keeping only bet slot i."""
    bets = tuple((rows[i],) for rows in spec.bets)
    return GamblerSpec(spec.alphabet, spec.states, spec.transitions, bets, spec.q0, spec.c0, 1)


def induced_oracle(spec: GamblerSpec, s):
    from .gale import GamblerOracle

    return GamblerOracle(spec, Fraction(s))
