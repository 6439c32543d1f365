"""Pure-Python hot kernels.

Reference implementations with arbitrary-precision integers.  The compiled
module ``_ckernels`` exposes the same functions and must agree exactly.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter


def _value_counts(coeffs, k, values):
    table = {0: 1}
    for a in coeffs:
        terms = Counter(a * v**k for v in values)
        nxt = Counter()
        for acc, c in table.items():
            for t, m in terms.items():
                nxt[acc + t] += c * m
        table = nxt
    return table


def count_zero_sums(coeffs, k, values):
    """Number of x in values^s with sum a_j x_j^k == 0 (meet in the middle)."""
    h = len(coeffs) // 2
    left = _value_counts(coeffs[:h], k, values)
    right = _value_counts(coeffs[h:], k, values)
    if len(left) > len(right):
        left, right = right, left
    return sum(c * right.get(-v, 0) for v, c in left.items())


def _min_norms(coeffs, k, B):
    # value -> least sup-norm over nonzero tuples in [-B, B]^len(coeffs)
    best: dict[int, int] = {}
    for a in coeffs:
        nxt = dict()
        for v in range(-B, B + 1):
            t = a * v**k
            n = abs(v)
            # extend the zero tuple
            if v:
                if nxt.get(t, n + 1) > n:
                    nxt[t] = n
            for acc, m in best.items():
                key = acc + t
                mm = m if m > n else n
                if nxt.get(key, mm + 1) > mm:
                    nxt[key] = mm
        best = nxt
    return best


def min_norm(coeffs, k, B):
    """Least sup-norm of a nonzero solution in [-B, B]^s, or 0 when there is none."""
    h = len(coeffs) // 2
    left = _min_norms(coeffs[:h], k, B)
    right = _min_norms(coeffs[h:], k, B)
    cands = [left.get(0, 0), right.get(0, 0)]
    for v, m in left.items():
        r = right.get(-v)
        if r is not None:
            cands.append(m if m > r else r)
    cands = [c for c in cands if c]
    return min(cands) if cands else 0


def cyclic_convolve(hists, modulus):
    """Cyclic convolution of nonnegative count vectors of length ``modulus``."""
    acc = [0] * modulus
    acc[0] = 1
    for h in hists:
        support = [(i, c) for i, c in enumerate(h) if c]
        nxt = [0] * modulus
        for i, a in enumerate(acc):
            if a:
                for j, c in support:
                    nxt[(i + j) % modulus] += a * c
        acc = nxt
    return acc


def gauss_sum_table(q, k):
    """[S(q, r) for r in range(q)] with S(q, r) = sum_x e(r x^k / q)."""
    hist = Counter(pow(x, k, q) for x in range(q))
    out = []
    for r in range(q):
        z = 0j
        for c, m in hist.items():
            z += m * cmath.exp(2j * math.pi * ((r * c) % q) / q)
        out.append(z)
    return out
