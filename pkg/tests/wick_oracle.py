"""Independent Wick-rule oracle for exact joint moments.

Deliberately shares no code with wignerlab.combinat or
wignerlab.moments: polynomials are expanded into monomials by hand,
non-crossing pairings are enumerated by the classic first-element
recursion, and lattice sums are evaluated with a brute meshgrid.  The
only library import is the covariance model protocol (rho lookups).

The trace of a product of semicircular monomials is a sum over
non-crossing pairings of the letters, each pairing contributing the
product of pair covariances.  Grouping pairings by how many chords
join each pair of factors turns the oracle value into a polynomial in
the correlation values, which is what `patterns` caches per (q, p).
"""

import itertools
from functools import lru_cache

import numpy as np

# Second-kind recursion x*U_k = U_{k+1} + U_{k-1}, written out by hand
# as {degree: coefficient} so nothing here depends on wignerlab.poly.
U_MONOMIALS = {
    1: {1: 1.0},
    2: {2: 1.0, 0: -1.0},
    3: {3: 1.0, 1: -2.0},
}


def nc_pairings(m):
    """All non-crossing pairings of range(m) as tuples of index pairs."""

    def rec(positions):
        if not positions:
            return [()]
        out = []
        first = positions[0]
        # first must pair at odd offset or the two sides can't pair up
        for z in range(1, len(positions), 2):
            inside = rec(positions[1:z])
            outside = rec(positions[z + 1:])
            for pi in inside:
                for po in outside:
                    out.append(((first, positions[z]),) + pi + po)
        return out

    return rec(list(range(m)))


@lru_cache(maxsize=None)
def patterns(q, p):
    """Map upper-triangular chord-count keys to total coefficients.

    The key is the tuple (a_12, a_13, ..., a_{p-1,p}) counting chords
    between distinct factors; chords inside one factor multiply by
    rho(0) = 1 and are dropped from the key.
    """
    mono = U_MONOMIALS[q]
    out = {}
    for degrees in itertools.product(mono, repeat=p):
        coeff = 1.0
        for d in degrees:
            coeff *= mono[d]
        owner = []
        for i, d in enumerate(degrees):
            owner.extend([i] * d)
        if len(owner) % 2 == 1:
            continue
        for pairing in nc_pairings(len(owner)):
            key = [0] * (p * (p - 1) // 2)
            for a, b in pairing:
                i, j = owner[a], owner[b]
                if i == j:
                    continue
                if i > j:
                    i, j = j, i
                key[i * p - i * (i + 1) // 2 + (j - i - 1)] += 1
            key = tuple(key)
            out[key] = out.get(key, 0.0) + coeff
    return out


def oracle_joint_moment(q, p, n, model, t=1.0):
    """Sum of phi(U_q(X_{k_1}) ... U_q(X_{k_p})) over the lattice.

    Every k_i runs over 1..floor(n*t); model supplies rho.
    """
    size = int(np.floor(n * t))
    rho_table = np.array([float(model.rho(lag)) for lag in range(size)])
    idx = np.arange(size)
    grids = np.meshgrid(*([idx] * p), indexing="ij")
    total = 0.0
    for key, coeff in patterns(q, p).items():
        term = np.ones([size] * p)
        pos = 0
        for i in range(p):
            for j in range(i + 1, p):
                a = key[pos]
                pos += 1
                if a:
                    term = term * rho_table[np.abs(grids[i] - grids[j])] ** a
        total += coeff * term.sum()
    return float(total)
