"""Semicircular moment calculus.

Semicircle moments (Catalan numbers), the free Wick rule for jointly
semicircular families (sum over non-crossing pairings weighted by the
covariance), and the moment/free-cumulant transforms (sums over
non-crossing partitions).  These are the oracles the rest of the
package is checked against.
"""

from __future__ import annotations

import math

import numpy as np

from .combinat import MAX_PARTITION_N, catalan, enumerate_nc
from .errors import DomainError, SizeError

MAX_WORD_LEN = 16
PSD_CLIP = -1e-10


def semicircle_moment(k: int, mean: float = 0.0, variance: float = 1.0) -> float:
    """k-th raw moment of the semicircle law S(mean, variance).

    Central moments are Catalan: E[(X-m)^{2j}] = C_j sigma^{2j}, odd
    ones vanish; raw moments follow by the binomial shift.
    """
    if k < 0:
        raise DomainError("moment order must be >= 0")
    if variance < 0:
        raise DomainError("variance must be >= 0")
    total = 0.0
    for i in range(0, k + 1, 2):
        central = catalan(i // 2) * variance ** (i // 2)
        total += math.comb(k, i) * mean ** (k - i) * central
    return float(total)


def semicircle_density(x, mean: float = 0.0, variance: float = 1.0):
    """Density of S(mean, variance), vectorized; zero off the support."""
    if variance <= 0:
        raise DomainError("variance must be > 0 for a density")
    x = np.asarray(x, dtype=float)
    rad2 = 4 * variance - (x - mean) ** 2
    out = np.where(rad2 > 0, np.sqrt(np.clip(rad2, 0, None)) / (2 * np.pi * variance), 0.0)
    return out if out.ndim else float(out)


def prepare_cov(gamma) -> np.ndarray:
    """Validate a covariance matrix and clip it to PSD.

    Accepts symmetric matrices whose smallest eigenvalue is >= -1e-10
    (tiny negative values are rounding noise and get clipped to zero);
    anything more negative is rejected.
    """
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DomainError("covariance must be a square matrix, got shape %r" % (g.shape,))
    if not np.allclose(g, g.T, rtol=0.0, atol=1e-12):
        raise DomainError("covariance must be symmetric")
    g = (g + g.T) / 2
    w, v = np.linalg.eigh(g)
    if w.min() < PSD_CLIP:
        raise DomainError("covariance has eigenvalue %.3e < %.0e, not PSD"
                          % (w.min(), PSD_CLIP))
    if w.min() < 0:
        g = (v * np.clip(w, 0, None)) @ v.T
        g = (g + g.T) / 2
    return g


def wick_joint_moment(gamma, word) -> float:
    """phi(X_{w_1} X_{w_2} ... X_{w_k}) for a semicircular family.

    gamma is the family covariance, word a sequence of indices into it.
    The free Wick rule sums over non-crossing pairings only:
    phi = sum over NC pairings pi of prod_{(a,b) in pi} gamma[w_a, w_b].
    """
    g = prepare_cov(gamma)
    w = [int(i) for i in word]
    if len(w) > MAX_WORD_LEN:
        raise SizeError("word length %d exceeds cap %d" % (len(w), MAX_WORD_LEN))
    if any(i < 0 or i >= g.shape[0] for i in w):
        raise DomainError("word indices must address rows of gamma")
    if len(w) % 2:
        return 0.0
    total = 0.0
    for pairing in enumerate_nc("pairing", len(w)):
        prod = 1.0
        for a, b in pairing.blocks:
            prod *= g[w[a], w[b]]
        total += prod
    return total


def free_moments_from_cumulants(kappa, n: int):
    """Moments m_1..m_n from free cumulants kappa_1..kappa_n.

    m_k = sum over non-crossing partitions pi of [k] of
    prod_{V in pi} kappa_{|V|}.
    """
    ks = list(kappa)
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > MAX_PARTITION_N:
        raise SizeError("n=%d exceeds the partition cap %d" % (n, MAX_PARTITION_N))
    if len(ks) < n:
        raise DomainError("need kappa_1..kappa_%d, got %d values" % (n, len(ks)))
    out = []
    for k in range(1, n + 1):
        total = 0.0
        for part in enumerate_nc("partition", k):
            prod = 1.0
            for block in part.blocks:
                prod *= ks[len(block) - 1]
            total += prod
        out.append(total)
    return out


def cumulants_from_moments(moments, n: int):
    """Free cumulants kappa_1..kappa_n from moments m_1..m_n.

    Triangular inversion of the non-crossing moment-cumulant relation:
    kappa_k = m_k - sum over NC partitions with more than one block.
    """
    ms = list(moments)
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > MAX_PARTITION_N:
        raise SizeError("n=%d exceeds the partition cap %d" % (n, MAX_PARTITION_N))
    if len(ms) < n:
        raise DomainError("need m_1..m_%d, got %d values" % (n, len(ms)))
    kappa = []
    for k in range(1, n + 1):
        correction = 0.0
        for part in enumerate_nc("partition", k):
            if len(part.blocks) == 1:
                continue
            prod = 1.0
            for block in part.blocks:
                prod *= kappa[len(block) - 1]
            correction += prod
        kappa.append(ms[k - 1] - correction)
    return kappa
