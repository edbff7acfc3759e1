"""Tchebycheff (second kind) and Hermite polynomial utilities.

Both families are monic under the probabilist-style normalizations used
here and satisfy three-term recursions

    x U_k = U_{k+1} + U_{k-1},        U_0 = 1, U_1 = x
    x H_k = H_{k+1} + k H_{k-1},      H_0 = 1, H_1 = x

so U_2 = x^2 - 1, U_3 = x^3 - 2x, H_2 = x^2 - 1, H_3 = x^3 - 3x.
The Tchebycheff family is orthonormal for the standard semicircle law,
the Hermite family for the standard Gaussian; the *rank* of a polynomial
(the lowest non-constant basis degree present) therefore depends on the
basis, which is the whole point of the rank-divergence fixture
x^4 - 3x^2 + 1 (Tchebycheff rank 4, Hermite rank 2).

Decomposition is carried out in exact rational arithmetic; float inputs
are converted exactly and tiny coefficients are snapped to zero at a
configurable threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, SizeError

MAX_DEGREE = 64
ZERO_SNAP = 1e-12

_BASES = ("tcheb", "hermite")


def tcheb_u(k: int, x):
    """Evaluate U_k(x) by the three-term recursion.

    Works for floats, ints, Fractions and numpy arrays alike; exact
    input types stay exact.
    """
    if k < 0:
        raise DomainError("polynomial degree must be >= 0, got %r" % (k,))
    if k == 0:
        return x * 0 + 1
    prev, cur = x * 0 + 1, x
    for _ in range(1, k):
        prev, cur = cur, x * cur - prev
    return cur


def hermite_h(k: int, x):
    """Evaluate H_k(x) by the three-term recursion (same conventions)."""
    if k < 0:
        raise DomainError("polynomial degree must be >= 0, got %r" % (k,))
    if k == 0:
        return x * 0 + 1
    prev, cur = x * 0 + 1, x
    for j in range(1, k):
        prev, cur = cur, x * cur - j * prev
    return cur


@lru_cache(maxsize=None)
def tcheb_coeffs(k: int) -> tuple:
    """Monomial coefficients of U_k, lowest degree first, exact ints."""
    if k == 0:
        return (1,)
    if k == 1:
        return (0, 1)
    a = tcheb_coeffs(k - 1)
    b = tcheb_coeffs(k - 2)
    out = [0] * (k + 1)
    for i, c in enumerate(a):
        out[i + 1] += c
    for i, c in enumerate(b):
        out[i] -= c
    return tuple(out)


@lru_cache(maxsize=None)
def hermite_coeffs(k: int) -> tuple:
    """Monomial coefficients of H_k, lowest degree first, exact ints."""
    if k == 0:
        return (1,)
    if k == 1:
        return (0, 1)
    a = hermite_coeffs(k - 1)
    b = hermite_coeffs(k - 2)
    out = [0] * (k + 1)
    for i, c in enumerate(a):
        out[i + 1] += c
    for i, c in enumerate(b):
        out[i] -= (k - 1) * c
    return tuple(out)


@dataclass(frozen=True)
class TchebExpansion:
    """Expansion of a polynomial in one of the two orthogonal bases.

    coeffs maps basis degree -> coefficient (zeros omitted); rank is the
    smallest degree >= 1 with a nonzero coefficient, or None when the
    polynomial is constant.  Despite the name the basis may be either
    family; `basis` records which.
    """

    coeffs: dict
    basis: str
    rank: int | None = field(init=False)

    def __post_init__(self):
        if self.basis not in _BASES:
            raise DomainError("basis must be one of %r, got %r" % (_BASES, self.basis))
        live = sorted(s for s in self.coeffs if s >= 1)
        object.__setattr__(self, "rank", live[0] if live else None)

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def coefficient(self, s: int):
        return self.coeffs.get(s, 0)


def _basis_coeffs(basis: str, k: int) -> tuple:
    return tcheb_coeffs(k) if basis == "tcheb" else hermite_coeffs(k)


def decompose(monomial_coeffs, basis: str = "tcheb",
              zero_tol: float = ZERO_SNAP) -> TchebExpansion:
    """Rewrite sum_j c_j x^j in the requested basis.

    monomial_coeffs lists c_0, c_1, ... lowest degree first.  The
    back-substitution runs in exact rational arithmetic (both bases are
    monic); results stay exact for int/Fraction input and are returned
    as floats otherwise, with |a_s| < zero_tol snapped to zero.
    """
    if basis not in _BASES:
        raise DomainError("basis must be one of %r, got %r" % (_BASES, basis))
    coeffs = list(monomial_coeffs)
    if not coeffs:
        raise DomainError("empty coefficient list")
    if len(coeffs) - 1 > MAX_DEGREE:
        raise SizeError("degree %d exceeds the %d cap" % (len(coeffs) - 1, MAX_DEGREE))
    exact = all(isinstance(c, (int, Fraction)) for c in coeffs)
    work = [Fraction(c) for c in coeffs]
    out = {}
    for s in range(len(work) - 1, 0, -1):
        a = work[s]
        if a != 0:
            out[s] = a
            for i, b in enumerate(_basis_coeffs(basis, s)):
                work[i] -= a * b
    if work[0] != 0:
        out[0] = work[0]

    def fin(v: Fraction):
        if exact:
            return int(v) if v.denominator == 1 else v
        return float(v)

    cleaned = {}
    for s, v in out.items():
        if not exact and abs(v) < zero_tol:
            continue
        cleaned[s] = fin(v)
    return TchebExpansion(coeffs=cleaned, basis=basis)


def reconstruct(expansion: TchebExpansion) -> list:
    """Inverse of decompose: monomial coefficients, lowest degree first."""
    deg = expansion.degree
    out = [Fraction(0)] * (deg + 1)
    exact = True
    for s, a in expansion.coeffs.items():
        if not isinstance(a, (int, Fraction)):
            exact = False
        af = Fraction(a)
        for i, b in enumerate(_basis_coeffs(expansion.basis, s)):
            out[i] += af * b
    if exact:
        return [int(v) if v.denominator == 1 else v for v in out]
    return [float(v) for v in out]
