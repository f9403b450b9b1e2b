from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from galelab import BINARY, Distribution


@st.composite
def distributions(draw, max_block=4, positive=False):
    ell = draw(st.integers(1, max_block))
    blocks = list(product((0, 1), repeat=ell))
    lo = 1 if positive else 0
    raw = draw(st.lists(st.integers(lo, 20), min_size=len(blocks), max_size=len(blocks)))
    if sum(raw) == 0:
        raw[0] = 1
    total = sum(raw)
    return Distribution(BINARY, ell, {b: Fraction(r, total) for b, r in zip(blocks, raw) if r})


binary_words = st.text(alphabet="01", max_size=40)
nonempty_words = st.text(alphabet="01", min_size=1, max_size=60)
seeds = st.integers(0, 2**32 - 1)
s_values = st.fractions(min_value=0, max_value=2, max_denominator=8)
