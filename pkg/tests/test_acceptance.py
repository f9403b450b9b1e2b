"""Acceptance checks, one per criterion, each at its stated tolerance and time budget.

Run with pytest, or directly (``python3 tests/test_acceptance.py``) for the
summary lines alone.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from galelab import GeneratorConfig, PrefixSet, check_kraft_inequality, extract_cover
from galelab.construct import extend_phase, replicate_bets
from galelab.dimension import (
    equivalence_experiment,
    estimate_fs_dimension,
    even_checkpoints,
    prepare_gambler,
    success_diagnostic,
)
from galelab.entropy import block_entropy, count_blocks, entropy_profile
from galelab.errors import ThresholdNeverReached
from galelab.gale import enumerate_prefix_sets
from galelab.gambler import constant_gambler, induced_oracle, random_gambler, run, run_log2
from galelab.seqgen import generate
from galelab.verify import random_product_gale, suite_construct, suite_gale, suite_root

H_QUARTER = 0.81128
SEED = 20240607
RESULTS = []


def record(number, passed, detail, elapsed, budget):
    ok = passed and elapsed < budget
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s / {budget}s]"
    RESULTS.append(line)
    return ok, line


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def c1_gale_condition():
    res = suite_gale(100, SEED)
    return res.passed and res.checked == 100 * 127, f"{res.checked} exact checks, {len(res.failures)} failures"


def c2_root_supergale():
    res = suite_root(10_000, SEED, words_per_gale=100)
    return res.passed and res.checked == 10_000, f"{res.checked} words over 100 gales, {len(res.failures)} violations"


def c3_kraft():
    rng = random.Random(SEED)
    sets = list(enumerate_prefix_sets(3))
    anchors = ["".join(p) for L in range(3) for p in itertools.product("01", repeat=L)]
    violations = checked = 0
    for _ in range(20):
        oracle = random_product_gale(rng, rng.randint(1, 4), rng.choice([0, Fraction(1, 2), Fraction(3, 4), 1, 2]))
        for w in anchors:
            for B in sets:
                checked += 1
                violations += not check_kraft_inequality(oracle, w, B)
    ok = len(sets) == 677 and violations == 0
    return ok, f"{len(sets)} antichains x {len(anchors)} anchors x 20 gales = {checked} checks, {violations} violations"


def c4_construction():
    res = suite_construct(50, SEED, n=10_000)
    return res.passed, f"{res.checked} checks over 50 distributions, {len(res.failures)} failures"


def c5_transforms():
    rng = random.Random(SEED)
    bad = 0
    for _ in range(100):
        spec = random_gambler(rng, rng.randint(1, 6), rng.randint(1, 3), c0=Fraction(rng.randint(1, 4), rng.randint(1, 4)))
        x = "".join(rng.choice("01") for _ in range(rng.randint(0, 40)))
        m, L = rng.randint(1, 3), rng.randint(1, 5)
        s = Fraction(rng.randint(0, 8), 4)
        base = run(spec, s, x)
        ext = run(extend_phase(spec, L), s, x)
        same = [(a.mantissa, a.step_count) for a in base.ledgers] == [(b.mantissa, b.step_count) for b in ext.ledgers]
        rep = run(replicate_bets(spec, m), s, x).final
        bad += not (same and rep.mantissa == base.final.mantissa**m)
    return bad == 0, f"100 (spec, x, m) triples, {bad} mismatches"


def c6_entropy_ground_truths():
    periodic = generate(GeneratorConfig("periodic", 10_000, pattern="01"))
    h2 = estimate_fs_dimension(periodic, 2, "disjoint").per_l[2]
    bern = generate(GeneratorConfig("bernoulli", 1_000_000, bias=Fraction(1, 4), seed=42))
    h1 = entropy_profile(bern, 1, "disjoint").running_min
    dim = estimate_fs_dimension(bern, 8, "disjoint").estimate
    champ = generate(GeneratorConfig("champernowne", 1_000_000))
    ch = estimate_fs_dimension(champ, 4, "disjoint").per_l
    ok = h2 == 0.0 and abs(h1 - H_QUARTER) <= 0.01 and abs(dim - H_QUARTER) <= 0.03 and min(ch.values()) >= 0.95
    detail = (f"(01)^inf H_2={h2}; Bernoulli(1/4) H_1={h1:.5f}, dim={dim:.5f}; "
              f"Champernowne min H_l={min(ch.values()):.4f}")
    return ok, detail


def c7_equivalence():
    inputs = {
        "Bernoulli(1/4)": GeneratorConfig("bernoulli", 1_000_000, bias=Fraction(1, 4), seed=42),
        "Bernoulli(1/2)": GeneratorConfig("bernoulli", 1_000_000, bias=Fraction(1, 2), seed=42),
        "Thue-Morse": GeneratorConfig("thue_morse", 1_000_000),
    }
    gaps, ok = [], True
    for name, cfg in inputs.items():
        rep = equivalence_experiment(generate(cfg), 6, 1_000_000)
        gaps.append(f"{name} gap={rep.estimate_gap:.4f} (disjoint {rep.disjoint_estimate:.4f}, "
                    f"sliding {rep.sliding_estimate:.4f})")
        ok &= rep.estimate_gap <= 0.02
    return ok, "; ".join(gaps)


def c8_dichotomy():
    x = generate(GeneratorConfig("bernoulli", 100_000, bias=Fraction(1, 4), seed=42)).take()
    cps = even_checkpoints(len(x))
    ok, parts = True, []
    for mode, ell in (("disjoint", 1), ("sliding", 2)):
        h = block_entropy(count_blocks(x.tolist(), ell, mode))
        _, spec = prepare_gambler(x, ell, mode)
        up = success_diagnostic(run_log2(spec, Fraction(h + 0.1), x, cps))
        down = success_diagnostic(run_log2(spec, Fraction(h - 0.1), x, cps))
        ok &= up.tail_slope >= 0.05 and up.verdict == "winning"
        ok &= down.tail_slope <= -0.05 and down.verdict == "losing"
        parts.append(f"{mode} l={ell}: slope {up.tail_slope:+.3f} / {down.tail_slope:+.3f}")
    return ok, "; ".join(parts)


def c9_cover():
    cert = extract_cover(induced_oracle(constant_gambler((0, 1)), 1), 1, 1, 12)
    ok = cert.members == PrefixSet.of(["111"]) and cert.kraft_sum == 0.125 and cert.valid
    rng = random.Random(SEED)
    found = worst = 0
    while found < 10:
        oracle = random_product_gale(rng, rng.randint(1, 3), 1, allow_extremes=False)
        try:
            c = extract_cover(oracle, 2, 1, 12)
        except ThresholdNeverReached:
            continue
        found += 1
        worst = max(worst, c.kraft_sum / c.bound)
        ok &= c.kraft_sum <= 2.0**-2
    return ok, f"all-in cover {cert.members.strings()} sum {cert.kraft_sum}; 10 random covers, max sum/bound {worst:.3f}"


CRITERIA = [
    (1, c1_gale_condition, 10),
    (2, c2_root_supergale, 30),
    (3, c3_kraft, 30),
    (4, c4_construction, 30),
    (5, c5_transforms, 10),
    (6, c6_entropy_ground_truths, 60),
    (7, c7_equivalence, 90),
    (8, c8_dichotomy, 60),
    (9, c9_cover, 30),
]


@pytest.mark.parametrize("number,fn,budget", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, fn, budget):
    (passed, detail), elapsed = timed(fn)
    ok, line = record(number, passed, detail, elapsed, budget)
    print(line)
    assert ok, line


if __name__ == "__main__":
    for number, fn, budget in CRITERIA:
        (passed, detail), elapsed = timed(fn)
        print(record(number, passed, detail, elapsed, budget)[1], flush=True)
    print(f"{sum('PASS' in r for r in RESULTS)}/{len(RESULTS)} criteria pass")
    raise SystemExit(0 if all("PASS" in r for r in RESULTS) else 1)
