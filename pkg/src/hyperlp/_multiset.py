"""Sorted-multiset enumeration and ranking.

A sorted multiset ``a_0 <= a_1 <= ... <= a_{r-1}`` over ``range(n)`` maps to the
strictly increasing sequence ``b_i = a_i + i``; its colexicographic combinadic
``sum_i C(b_i, i + 1)`` is a bijection onto ``range(C(n + r - 1, r))``.
"""
from functools import lru_cache
from math import comb

import numpy as np


def n_multisets(n, r):
    """Number of sorted r-multisets over n symbols."""
    return comb(n + r - 1, r)


@lru_cache(maxsize=16)
def _binom_table(top, r):
    table = np.zeros((top + 1, r + 1), dtype=np.int64)
    for x in range(top + 1):
        for k in range(r + 1):
            table[x, k] = comb(x, k)
    table.flags.writeable = False
    return table


def multiset_rank(rows, n):
    """Rank sorted multisets (rows of an ``(m, r)`` integer array).

    Rows must already be sorted ascending; no check is made here.
    """
    rows = np.asarray(rows)
    if rows.ndim == 1:
        rows = rows[None, :]
    m, r = rows.shape
    if r == 0:
        return np.zeros(m, dtype=np.int64)
    if n_multisets(n, r) >= 2**62:
        raise OverflowError(f"too many {r}-multisets over {n} symbols to rank in int64")
    table = _binom_table(n + r - 1, r)
    rank = np.zeros(m, dtype=np.int64)
    for i in range(r):
        rank += table[rows[:, i].astype(np.int64) + i, i + 1]
    return rank


@lru_cache(maxsize=4)
def enumerate_multisets(n, r):
    """All sorted r-multisets over ``range(n)`` in lexicographic order.

    Returns a read-only ``(C(n+r-1, r), r)`` int32 array.  Cached because the
    sampler draws over the same enumeration for every trial.
    """
    # Multisets of length k whose entries lie in [lo, n) for every lo form a
    # suffix of the lexicographic list over [0, n); build from the right.
    tails = np.arange(n, dtype=np.int32)[:, None]
    for _ in range(r - 1):
        # start index of the suffix whose first entry is >= a
        first = tails[:, 0]
        starts = np.searchsorted(first, np.arange(n), side="left")
        blocks = []
        for a in range(n):
            t = tails[starts[a]:]
            head = np.full((t.shape[0], 1), a, dtype=np.int32)
            blocks.append(np.hstack([head, t]))
        tails = np.vstack(blocks)
    if r == 0:
        tails = np.zeros((1, 0), dtype=np.int32)
    tails.flags.writeable = False
    return tails


def multiplicity_factor(rows):
    """Product of factorials of value multiplicities for each sorted row."""
    rows = np.asarray(rows)
    m, r = rows.shape
    out = np.ones(m, dtype=np.float64)
    run = np.ones(m, dtype=np.float64)
    for i in range(1, r):
        same = rows[:, i] == rows[:, i - 1]
        run = np.where(same, run + 1.0, 1.0)
        out *= run
    return out
