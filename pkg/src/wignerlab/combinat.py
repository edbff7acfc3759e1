"""Contraction combinatorics for products of Tchebycheff blocks.

A profile q = (q_1, ..., q_p) describes p blocks carrying q_j "dots"
each.  A contraction vector r = (r_1, ..., r_{p-1}) prescribes, for
j = 2..p, how many dots of block j are associated leftward into blocks
1..j-1.  Admissibility requires

    0 <= r_{j-1} <= q_j   and   r_{j-1} <= q_1 + ... + q_{j-1}
                                          - 2 (r_1 + ... + r_{j-2}),

i.e. block j cannot absorb more dots than earlier blocks still expose.
A vector is *scalar* (complete) when 2 sum(r) = sum(q): every dot ends
up paired.  The association rule is greedy and deterministic: step j
repeatedly pairs the leftmost free dot of block j with the rightmost
free dot of the preceding blocks.  alpha_matrix counts the resulting
pairs per block pair (i, j); scalar vectors satisfy
sum_{i<j} alpha_ij = sum(q)/2.

Also here: enumeration of non-crossing pairings and partitions, used by
the Wick-style moment formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SizeError

MAX_TOTAL_DOTS = 40
MAX_PAIRING_N = 16
MAX_PARTITION_N = 12


def _check_profile(q_list):
    q = tuple(int(v) for v in q_list)
    if len(q) < 2:
        raise DomainError("a profile needs at least two blocks, got %r" % (q,))
    if any(v < 1 for v in q):
        raise DomainError("block sizes must be >= 1, got %r" % (q,))
    if sum(q) > MAX_TOTAL_DOTS:
        raise SizeError("profile has %d dots, cap is %d" % (sum(q), MAX_TOTAL_DOTS))
    return q


@dataclass(frozen=True, eq=False)
class ContractionVector:
    """One admissible r for a profile, with its association counts.

    alpha is a (p, p) integer array, upper triangle holding the number
    of associations between blocks i < j (0-based indices).
    """

    profile: tuple
    r: tuple
    scalar: bool
    alpha: np.ndarray

    def alpha_entry(self, i: int, j: int) -> int:
        i, j = (i, j) if i < j else (j, i)
        return int(self.alpha[i, j])


def _admissible(q, r):
    """Check r against the chained bounds; return True/False."""
    if len(r) != len(q) - 1:
        return False
    used = 0
    for j in range(1, len(q)):
        avail = sum(q[:j]) - 2 * used
        if not (0 <= r[j - 1] <= min(q[j], avail)):
            return False
        used += r[j - 1]
    return True


def alpha_matrix(q_list, r) -> np.ndarray:
    """Association counts alpha_ij for an admissible contraction vector.

    Runs the greedy rule: for each block j = 2..p in turn, r_{j-1}
    times pair the leftmost free dot of block j with the rightmost free
    dot among blocks 1..j-1.  Raises DomainError when r is not
    admissible for the profile.
    """
    q = _check_profile(q_list)
    r = tuple(int(v) for v in r)
    if not _admissible(q, r):
        raise DomainError("r=%r is not admissible for profile %r" % (r, q))
    p = len(q)
    starts = np.concatenate(([0], np.cumsum(q)))
    block_of = np.repeat(np.arange(p), q)
    free = np.ones(starts[-1], dtype=bool)
    alpha = np.zeros((p, p), dtype=int)
    for j in range(1, p):
        lo, hi = starts[j], starts[j + 1]
        for _ in range(r[j - 1]):
            mine = np.flatnonzero(free[lo:hi])
            partner = np.flatnonzero(free[:lo])
            # admissibility guarantees both sides are non-empty
            d_right = lo + mine[0]
            d_left = partner[-1]
            free[d_right] = False
            free[d_left] = False
            alpha[block_of[d_left], j] += 1
    return alpha


def enumerate_contractions(q_list, scalar_only: bool = False):
    """All admissible contraction vectors for the profile, lexicographic.

    With scalar_only=True, keep just the complete ones (2 sum r = sum q),
    i.e. the vectors entering the joint-moment formulas.
    """
    q = _check_profile(q_list)
    total = sum(q)
    out = []

    def rec(j, used, prefix):
        if j == len(q):
            r = tuple(prefix)
            scalar = 2 * sum(r) == total
            if scalar_only and not scalar:
                return
            out.append(ContractionVector(profile=q, r=r, scalar=scalar,
                                         alpha=alpha_matrix(q, r)))
            return
        avail = sum(q[:j]) - 2 * used
        for v in range(0, min(q[j], avail) + 1):
            rec(j + 1, used + v, prefix + [v])

    rec(1, 0, [])
    return out


@dataclass(frozen=True)
class NCStructure:
    """A non-crossing pairing or partition of {0, ..., n-1}."""

    kind: str
    blocks: tuple

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)


def is_noncrossing(blocks) -> bool:
    """True when no two blocks a < b < a' < b' interleave."""
    for bi, B in enumerate(blocks):
        for C in blocks[bi + 1:]:
            for a in B:
                for b in C:
                    for a2 in B:
                        for b2 in C:
                            if a < b < a2 < b2 or b < a < b2 < a2:
                                return False
    return True


@lru_cache(maxsize=None)
def _pairings(n: int):
    """Non-crossing pairings of range(n) as tuples of 2-tuples."""
    if n == 0:
        return ((),)
    if n % 2:
        return ()
    out = []
    for m in range(1, n, 2):
        for inner in _pairings(m - 1):
            inner_shifted = tuple((a + 1, b + 1) for a, b in inner)
            for outer in _pairings(n - m - 1):
                outer_shifted = tuple((a + m + 1, b + m + 1) for a, b in outer)
                out.append(((0, m),) + inner_shifted + outer_shifted)
    return tuple(out)


@lru_cache(maxsize=None)
def _partitions(n: int):
    """Non-crossing partitions of range(n) as tuples of tuples."""
    if n == 0:
        return ((),)
    out = []

    def shift(parts, off):
        return tuple(tuple(x + off for x in b) for b in parts)

    def choose(block, last, acc_parts):
        # close the block of element 0 here
        tail = _partitions(n - 1 - last)
        for t in tail:
            out.append((tuple(block),) + acc_parts + shift(t, last + 1))
        # or extend it with a later element nxt, filling the gap
        for nxt in range(last + 1, n):
            for gap in _partitions(nxt - last - 1):
                choose(block + [nxt], nxt, acc_parts + shift(gap, last + 1))

    choose([0], 0, ())
    return tuple(out)


def enumerate_nc(kind: str, n: int):
    """Non-crossing pairings (n <= 16) or partitions (n <= 12) of n points.

    Odd n with kind="pairing" gives an empty list (no pairings exist).
    """
    if kind not in ("pairing", "partition"):
        raise DomainError("kind must be 'pairing' or 'partition', got %r" % (kind,))
    if n < 0:
        raise DomainError("n must be >= 0")
    cap = MAX_PAIRING_N if kind == "pairing" else MAX_PARTITION_N
    if n > cap:
        raise SizeError("n=%d exceeds the %s cap %d" % (n, kind, cap))
    raw = _pairings(n) if kind == "pairing" else _partitions(n)
    return [NCStructure(kind=kind, blocks=b) for b in raw]


def catalan(k: int) -> int:
    """The k-th Catalan number."""
    from math import comb

    return comb(2 * k, k) // (k + 1)
