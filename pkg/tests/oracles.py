"""Brute-force reference computations, written without the package internals.

Frozen values in the tests were produced by these functions.
"""

import math
from collections import Counter
from fractions import Fraction
from itertools import product


def binary_entropy(p):
    p = float(p)
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def windows(x, ell, mode):
    if mode == "disjoint":
        return [x[i:i + ell] for i in range(0, len(x) - len(x) % ell, ell)]
    return [x[i:i + ell] for i in range(len(x) - ell + 1)]


def plug_in_entropy(x, ell, mode, sigma=2):
    c = Counter(windows(x, ell, mode))
    total = sum(c.values())
    h = -sum(v / total * math.log2(v / total) for v in c.values())
    return h / (ell * math.log2(sigma))


def capital(states, delta, beta, q0, s, x, c0=Fraction(1)):
    """d(x) for a 1-bet binary gambler via d(wb) = 2^s d(w) [(1-b)(1-β) + bβ],
    β(q) being the probability placed on 1.  Returns (exact mantissa, log2 d)."""
    m, q = Fraction(c0), q0
    for ch in x:
        b = int(ch)
        m *= 2 * (beta[q] if b else 1 - beta[q])
        q = delta[(q, b)]
    if m == 0:
        return m, -math.inf
    return m, (float(s) - 1) * len(x) + math.log2(m.numerator) - math.log2(m.denominator)


def all_words(max_len):
    for n in range(max_len + 1):
        for w in product("01", repeat=n):
            yield "".join(w)


def champernowne(n, base=2):
    digits = "0123456789"
    out, i = [], 0
    while sum(map(len, out)) < n:
        j, s = i, ""
        while True:
            s = digits[j % base] + s
            j //= base
            if j == 0:
                break
        out.append(s)
        i += 1
    return "".join(out)[:n]


def thue_morse(n):
    return "".join(str(bin(i).count("1") % 2) for i in range(n))
