import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galelab import (
    BINARY,
    CapitalLedger,
    build_disjoint_gambler,
    check_gale_condition,
    check_root_supergale,
    cumulative_block_bet,
    induced_oracle,
    run,
    run_log2,
    validate_distribution,
    validate_gambler,
)
from galelab.errors import MissingTransition, RowNotStochastic, UnknownStartState
from galelab.gambler import (
    constant_gambler,
    final_log2_capital,
    load_gambler,
    project_bet,
    random_gambler,
)

import oracles
from strategies import binary_words, s_values, seeds

FAIR = constant_gambler(("1/2", "1/2"))
ALL_IN = constant_gambler((0, 1))


def raw_single(row=("1/2", "1/2")):
    return {"alphabet": ["0", "1"], "k": 1, "states": ["q"], "q0": "q", "c0": "1",
            "delta": {"q,0": "q", "q,1": "q"}, "beta": {"q": [list(row)]}}


def test_validate_examples():
    spec = validate_gambler(raw_single())
    assert spec.states == ("q",) and spec.k == 1
    with pytest.raises(RowNotStochastic):
        validate_gambler(raw_single(("1/3", "1/3")))
    raw = raw_single()
    del raw["delta"]["q,1"]
    with pytest.raises(MissingTransition):
        validate_gambler(raw)
    raw = raw_single()
    raw["q0"] = "nowhere"
    with pytest.raises(UnknownStartState):
        validate_gambler(raw)


def test_json_round_trip(tmp_path):
    spec = random_gambler(random.Random(4), 5, 3)
    path = tmp_path / "g.json"
    path.write_text(spec.to_json())
    back = load_gambler(path)
    assert back.same_as(spec)
    d = json.loads(path.read_text())
    assert set(d) >= {"alphabet", "k", "states", "q0", "c0", "delta", "beta"}
    assert all("/" in p or p in ("0", "1") for rows in d["beta"].values() for r in rows for p in r)


def test_fair_run_is_flat():
    traj = run(FAIR, 1, "0110100")
    assert all(L.mantissa == 1 for L in traj.ledgers)
    assert all(v == 0.0 for v in traj.log2_capital)


def test_all_in_examples():
    win = run(ALL_IN, 1, "111").final
    assert win.mantissa == 8 and win.log2_value == 3.0
    assert run(ALL_IN, 1, "110").final.mantissa == 0
    assert run(ALL_IN, 1, "110").log2_capital[-1] == -math.inf


def test_trajectory_starts_at_c0():
    spec = constant_gambler(("1/4", "3/4"), c0=Fraction(5, 3))
    traj = run(spec, Fraction(1, 2), "1101")
    assert traj.ledgers[0].mantissa == Fraction(5, 3)
    assert list(traj.prefix_lengths) == [0, 1, 2, 3, 4]


def test_cumulative_block_bet_examples():
    assert cumulative_block_bet(FAIR, 0, "0110") == Fraction(1, 16)
    assert cumulative_block_bet(ALL_IN, 0, "11") == 1
    assert cumulative_block_bet(ALL_IN, 0, "10") == 0
    dist = validate_distribution(2, {"00": "1/2", "01": "1/4", "10": "1/8", "11": "1/8"})
    assert cumulative_block_bet(build_disjoint_gambler(dist), "", "01") == Fraction(1, 4)


def test_induced_oracle_bookkeeping():
    oracle = induced_oracle(FAIR, 1)
    assert oracle.k_factors == 1
    assert all(check_gale_condition(oracle, w) for w in oracles.all_words(6))
    two = induced_oracle(random_gambler(random.Random(9), 3, 2), Fraction(3, 4))
    rng = random.Random(1)
    for _ in range(200):
        w = "".join(rng.choice("01") for _ in range(rng.randint(0, 8)))
        assert check_root_supergale(two, w)


def test_capital_matches_textbook_recursion():
    # d(wb) = 2^s d(w) [(1-b)(1-β) + bβ] on a two-state automaton, evaluated independently
    states = ["a", "b"]
    delta = {("a", 0): "a", ("a", 1): "b", ("b", 0): "a", ("b", 1): "b"}
    beta = {"a": Fraction(1, 3), "b": Fraction(7, 8)}
    raw = {"states": states, "q0": "a", "c0": "1",
           "delta": {f"{q},{a}": t for (q, a), t in delta.items()},
           "beta": {q: [[str(1 - p), str(p)]] for q, p in beta.items()}}
    spec = validate_gambler(raw)
    x = "0111010011"
    ledger = run(spec, Fraction(1, 2), x).final
    # frozen from oracles.capital
    assert ledger.mantissa == Fraction(343, 1944)
    assert ledger.log2_value == pytest.approx(-7.502747737432967, abs=1e-12)
    assert oracles.capital(states, delta, beta, "a", Fraction(1, 2), x)[0] == ledger.mantissa


@settings(deadline=None)
@given(seeds, st.integers(1, 4), binary_words, s_values)
def test_product_decomposition(seed, k, x, s):
    spec = random_gambler(random.Random(seed), 4, k)
    whole = run(spec, s, x).final
    parts = [run(project_bet(spec, i), s, x).final for i in range(k)]
    prod = parts[0]
    for p in parts[1:]:
        prod = prod * p
    assert prod.mantissa == whole.mantissa * spec.c0 ** (k - 1)
    assert prod.k == whole.k == k


@given(seeds, binary_words)
def test_state_determinism(seed, x):
    spec = random_gambler(random.Random(seed), 6, 2)
    a, b = run(spec, 1, x), run(spec, 1, x)
    assert a.final_state == b.final_state == spec.delta_star(spec.q0, x)
    assert a.final.mantissa == b.final.mantissa


@settings(deadline=None)
@given(seeds, st.integers(1, 3), st.lists(st.integers(0, 1), max_size=200), s_values)
def test_log_domain_agrees_with_exact(seed, k, bits, s):
    spec = random_gambler(random.Random(seed), 5, k)
    exact = run(spec, s, bits).log2_capital
    fast = run_log2(spec, s, np.asarray(bits, dtype=np.int64)).log2_capital
    assert len(exact) == len(fast)
    for e, f in zip(exact, fast):
        if e == -math.inf:
            assert f == -math.inf
        else:
            assert f == pytest.approx(e, abs=1e-9)
    assert final_log2_capital(spec, s, bits) == pytest.approx(exact[-1], abs=1e-9) or exact[-1] == -math.inf


def test_ledger_initial_matches_spec():
    spec = random_gambler(random.Random(2), 3, 2, c0=Fraction(3, 2))
    assert run(spec, 1, "").final == CapitalLedger.initial(Fraction(3, 2), 1, 2)
    assert BINARY.sigma == spec.sigma
