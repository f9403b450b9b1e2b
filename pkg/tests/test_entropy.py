import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from galelab import BINARY, count_blocks, count_disjoint, count_sliding, entropy_profile, entropy_rate_estimate
from galelab.entropy import (
    block_entropy,
    checkpoint_schedule,
    default_burn_in,
    entropy_profiles,
)
from galelab.errors import EmptyCounts, LengthNotMultiple, StreamExhausted, WordTooShort
from galelab.seqgen import GeneratorConfig, SymbolStream, generate

import oracles
from strategies import nonempty_words


def periodic(pattern, n):
    return generate(GeneratorConfig("periodic", n, pattern=pattern))


def test_count_disjoint_examples():
    c = count_disjoint("0101", 2)
    assert c.as_strings() == {"01": 2} and c.window_total == 2
    assert count_disjoint("0110", 2).as_strings() == {"01": 1, "10": 1}
    with pytest.raises(LengthNotMultiple):
        count_disjoint("0101", 3)


def test_count_sliding_examples():
    c = count_sliding("0110", 2)
    assert c.as_strings() == {"01": 1, "10": 1, "11": 1} and c.window_total == 3
    # the last window i = n - l is counted
    assert count_sliding("0101", 2).as_strings() == {"01": 2, "10": 1}
    with pytest.raises(WordTooShort):
        count_sliding("1", 2)


def test_block_entropy_examples():
    assert block_entropy(count_disjoint("0101", 2)) == 0.0
    assert block_entropy(count_disjoint("0110", 2)) == pytest.approx(0.5)
    assert block_entropy(count_sliding("0110", 2)) == pytest.approx(math.log2(3) / 2)


def test_empty_counts():
    from galelab.entropy import BlockCounts

    with pytest.raises(EmptyCounts):
        block_entropy(BlockCounts(1, "disjoint", {}, 0))


def test_profile_periodic():
    rep2 = entropy_profile(periodic("01", 10_000), 2, "disjoint")
    assert all(h == 0.0 for _, h in rep2.checkpoints)
    assert rep2.running_min == 0.0
    rep1 = entropy_profile(periodic("01", 10_000), 1, "disjoint")
    assert all(h == 1.0 for _, h in rep1.checkpoints)


def test_profile_report_serializes():
    rep = entropy_profile(periodic("011", 3000), 2, "sliding")
    lines = rep.to_csv().splitlines()
    assert lines[0] == "prefix_len,H_value"
    assert len(lines) == len(rep.checkpoints) + 1
    assert json.loads(rep.to_json())["block_length"] == 2


def test_running_min_respects_burn_in():
    rep = entropy_profile(generate(GeneratorConfig("bernoulli", 20_000, bias="1/3", seed=5)), 2, "disjoint")
    past = [h for n, h in rep.checkpoints if n >= rep.burn_in]
    assert rep.running_min == min(past)
    assert rep.burn_in == default_burn_in(2, 2) == 400


def test_rate_estimate_periodic_and_constant():
    est = entropy_rate_estimate(periodic("01", 10_000), 2, "disjoint", n=10_000)
    assert est.per_l == {1: 1.0, 2: 0.0}
    assert est.estimate == 0.0
    zeros = entropy_rate_estimate(periodic("0", 5000), 3, "sliding", n=5000)
    assert zeros.estimate == 0.0


def test_sliding_periodic_value():
    # windows of (01)^m alternate 01,10, so sliding H_2 is one bit over two symbols
    est = entropy_rate_estimate(periodic("01", 10_000), 2, "sliding", n=10_000)
    assert est.per_l[1] == 1.0
    assert est.per_l[2] == pytest.approx(0.5, abs=1e-4)


def test_stream_exhausted():
    with pytest.raises(StreamExhausted):
        entropy_profile("0", 3, "sliding", schedule=[1])


def test_schedule_is_geometric_and_ends_at_n():
    sched = checkpoint_schedule(10_000, 100, granule=4)
    assert sched[-1] == 10_000
    assert all(c % 4 == 0 for c in sched)
    assert all(b > a for a, b in zip(sched, sched[1:]))
    assert sched[:4] == [100, 152, 228, 340]


def test_bernoulli_h1_small_sample():
    # frozen: oracles.plug_in_entropy on this prefix (12521 ones)
    x = generate(GeneratorConfig("bernoulli", 50_000, bias="1/4", seed=11)).take()
    assert int(x.sum()) == 12521
    rep = entropy_profile(x, 1, "disjoint", schedule=[50_000])
    assert rep.running_min == pytest.approx(0.8119431303188007, abs=1e-12)
    assert abs(rep.running_min - oracles.binary_entropy(0.25)) < 0.01


@given(nonempty_words, st.integers(1, 4), st.sampled_from(["disjoint", "sliding"]))
def test_counts_sum_to_total(x, ell, mode):
    if len(x) < ell:
        return
    c = count_blocks(x, ell, mode)
    assert sum(c.counts.values()) == c.window_total
    assert all(len(b) == ell for b in c.counts)
    h = block_entropy(c)
    assert 0.0 <= h <= 1.0


@given(nonempty_words)
def test_sliding_equals_disjoint_at_one(x):
    assert count_sliding(x, 1).counts == count_disjoint(x, 1).counts


@given(nonempty_words, st.integers(1, 3), st.sampled_from(["disjoint", "sliding"]))
def test_entropy_matches_oracle(x, ell, mode):
    if len(x) < ell:
        return
    c = count_blocks(x, ell, mode)
    assert block_entropy(c) == pytest.approx(oracles.plug_in_entropy(x, ell, mode), abs=1e-12)


@given(st.integers(1, 3))
def test_uniform_counts_give_one(ell):
    blocks = "".join("".join(map(str, b)) for b in BINARY.blocks(ell))
    assert block_entropy(count_disjoint(blocks, ell)) == pytest.approx(1.0)


@given(st.text(alphabet="01", min_size=1, max_size=5), st.integers(2, 20))
def test_aligned_periodic_words(u, m):
    # disjoint blocks of u^m at l = |u| are all u; sliding windows are the |u|
    # rotations of u, so H is at most log2|u| / |u|
    x = u * m
    assert block_entropy(count_disjoint(x, len(u))) == 0.0
    h = block_entropy(count_sliding(x, len(u)))
    assert h <= math.log2(len(u)) / len(u) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=50, max_size=400), st.integers(1, 17), st.integers(1, 4))
def test_streaming_independent_of_chunking(bits, chunk, ell):
    arr = np.asarray(bits, dtype=np.uint8)

    def factory(size):
        for i in range(0, len(arr), chunk):
            yield arr[i:i + chunk]

    stream = SymbolStream(BINARY, factory, len(arr))
    sched = [10, 25, len(arr)]
    a = entropy_profiles(stream, [ell], ["disjoint", "sliding"], schedule=sched, burn_in=0)
    b = entropy_profiles(arr, [ell], ["disjoint", "sliding"], schedule=sched, burn_in=0)
    for key in a:
        assert a[key].checkpoints == b[key].checkpoints
    text = "".join(map(str, bits))
    for mode in ("disjoint", "sliding"):
        final = a[(ell, mode)].checkpoints[-1][1]
        assert final == pytest.approx(min(1.0, oracles.plug_in_entropy(text, ell, mode)), abs=1e-12)
