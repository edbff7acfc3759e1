import itertools

import numpy as np
import pytest

from wignerlab.combinat import (
    alpha_matrix,
    catalan,
    enumerate_contractions,
    enumerate_nc,
    is_noncrossing,
)
from wignerlab.errors import DomainError, SizeError


def test_figure_fixture_alpha():
    a = alpha_matrix((3, 2, 4, 3), (1, 2, 3))
    expect = np.zeros((4, 4), dtype=int)
    expect[0, 1] = 1
    expect[0, 2] = 1
    expect[0, 3] = 1
    expect[1, 2] = 1
    expect[1, 3] = 0
    expect[2, 3] = 2
    np.testing.assert_array_equal(a, expect)
    assert a.sum() == 6 == sum((3, 2, 4, 3)) // 2


def test_alpha_hand_run_small():
    a = alpha_matrix((1, 1, 1, 1), (1, 0, 1))
    assert a[0, 1] == 1 and a[2, 3] == 1 and a.sum() == 2


def test_alpha_forced_two_blocks():
    for q in (1, 2, 3, 5):
        vecs = enumerate_contractions((q, q), scalar_only=True)
        assert len(vecs) == 1
        assert vecs[0].r == (q,)
        assert vecs[0].alpha[0, 1] == q


def test_scalar_enumeration_fixtures():
    assert enumerate_contractions((1, 1, 1), scalar_only=True) == []
    rs = [v.r for v in enumerate_contractions((1, 1, 1, 1), scalar_only=True)]
    assert rs == [(0, 1, 1), (1, 0, 1)]  # lexicographic
    rs = [v.r for v in enumerate_contractions((2, 2, 2, 2), scalar_only=True)]
    assert rs == [(0, 2, 2), (1, 1, 2), (2, 0, 2)]


def test_enumeration_matches_brute_force():
    """Depth-first output = brute filter of the chained inequalities."""
    for q in [(2, 2), (1, 2, 3), (2, 2, 2), (3, 1, 2, 2), (2, 3, 3, 2)]:
        got = {v.r for v in enumerate_contractions(q)}
        brute = set()
        for r in itertools.product(*(range(qj + 1) for qj in q[1:])):
            used = 0
            ok = True
            for j in range(1, len(q)):
                avail = sum(q[:j]) - 2 * used
                if r[j - 1] > min(q[j], avail):
                    ok = False
                    break
                used += r[j - 1]
            if ok:
                brute.add(r)
        assert got == brute


def test_alpha_invariants_random_profiles():
    rng = np.random.default_rng(3)
    for _ in range(25):
        p = int(rng.integers(2, 5))
        q = tuple(int(v) for v in rng.integers(1, 5, size=p))
        for vec in enumerate_contractions(q):
            a = vec.alpha
            assert (a >= 0).all()
            # column j collects exactly r_{j-1} associations
            for j in range(1, p):
                assert a[:j, j].sum() == vec.r[j - 1]
            if vec.scalar:
                assert a.sum() == sum(q) // 2
                # every dot of every block is used up
                for i in range(p):
                    assert a[i, :].sum() + a[:, i].sum() == q[i]


def test_alpha_entry_symmetrized_accessor():
    vec = enumerate_contractions((2, 2, 2, 2), scalar_only=True)[0]
    assert vec.alpha_entry(1, 0) == vec.alpha_entry(0, 1)


def test_alpha_rejects_inadmissible():
    with pytest.raises(DomainError):
        alpha_matrix((2, 2), (3,))
    with pytest.raises(DomainError):
        alpha_matrix((1, 1, 1), (0, 2))  # second block over-draws
    with pytest.raises(DomainError):
        alpha_matrix((2, 2), (1, 1))  # wrong length
    # incomplete but admissible vectors are allowed
    assert alpha_matrix((2, 2), (1,))[0, 1] == 1


def test_profile_validation():
    with pytest.raises(DomainError):
        enumerate_contractions((3,))
    with pytest.raises(DomainError):
        enumerate_contractions((2, 0))
    with pytest.raises(SizeError):
        enumerate_contractions((21, 21))


def test_scalar_count_matches_crossblock_pairings():
    """|B(q^p)| = #NC pairings of p blocks of q dots with no chord
    staying inside a block."""
    for q, p in [(1, 2), (1, 4), (2, 2), (2, 3), (2, 4)]:
        n = q * p
        block_of = [i // q for i in range(n)]
        count = 0
        for s in enumerate_nc("pairing", n):
            if all(block_of[a] != block_of[b] for a, b in s.blocks):
                count += 1
        assert count == len(enumerate_contractions((q,) * p, scalar_only=True))


def test_catalan_values():
    assert [catalan(k) for k in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


def test_nc_pairing_counts():
    for k in range(7):
        assert len(enumerate_nc("pairing", 2 * k)) == catalan(k)
    assert enumerate_nc("pairing", 5) == []


def test_nc_pairing_structure():
    out = enumerate_nc("pairing", 6)
    seen = set()
    for s in out:
        assert s.kind == "pairing"
        assert s.n == 6
        assert all(len(b) == 2 for b in s.blocks)
        assert sorted(x for b in s.blocks for x in b) == list(range(6))
        assert is_noncrossing(s.blocks)
        seen.add(tuple(sorted(s.blocks)))
    assert len(seen) == len(out)  # duplicate-free


def test_nc_partition_counts():
    # all 5 partitions of a 3-set are non-crossing; in general C_n
    for n in range(1, 8):
        assert len(enumerate_nc("partition", n)) == catalan(n)
    parts3 = enumerate_nc("partition", 3)
    assert len(parts3) == 5
    for s in parts3:
        assert sorted(x for b in s.blocks for x in b) == [0, 1, 2]


def test_nc_partition_noncrossing_only():
    for s in enumerate_nc("partition", 6):
        assert is_noncrossing(s.blocks)
    # the classic crossing example is never produced
    crossing = ((0, 2), (1, 3))
    assert not is_noncrossing(crossing)
    assert crossing not in [tuple(sorted(s.blocks))
                            for s in enumerate_nc("partition", 4)]


def test_is_noncrossing_nested_ok():
    assert is_noncrossing(((0, 3), (1, 2)))
    assert is_noncrossing(((0, 5), (1, 2), (3, 4)))


def test_nc_caps_and_validation():
    with pytest.raises(SizeError):
        enumerate_nc("pairing", 18)
    with pytest.raises(SizeError):
        enumerate_nc("partition", 13)
    with pytest.raises(DomainError):
        enumerate_nc("chain", 4)
    with pytest.raises(DomainError):
        enumerate_nc("pairing", -2)
