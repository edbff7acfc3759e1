"""Random-matrix simulators for the semicircular limit objects.

Desk-scale Monte Carlo backing for the exact formulas: symmetric
Gaussian matrices approximate free Brownian motion, jointly correlated
Wigner families approximate stationary semicircular sequences, and
scalar Gaussian (Hermite) sums give the classical side of the
free-vs-classical variance comparison.

Reproducibility: every rep r of a run with seed s draws from
numpy's SeedSequence(s, spawn_key=(r,)), so results are bit-identical
across runs and independent of rep ordering or batching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla
from scipy import signal

from .covariance import CovarianceModel, Geometric, toeplitz_cov
from .errors import DomainError, SizeError
from .moments import clt_variance
from .poly import TchebExpansion, hermite_h, tcheb_u

MAX_MATRIX_DIM = 2000
MAX_LATTICE = 10 ** 7


@dataclass(frozen=True)
class SimRow:
    """One reported quantity of a simulation run."""

    quantity: str
    value: float
    stderr: float | None
    reference: float | None
    meta: dict = field(default_factory=dict)


def _rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def _check_dim(n: int):
    if not 2 <= n <= MAX_MATRIX_DIM:
        raise SizeError("matrix dimension must lie in 2..%d, got %d"
                        % (MAX_MATRIX_DIM, n))


def sample_matrix_bm(n: int, times, seed: int = 0, rep: int = 0):
    """One path of the matrix Brownian motion at the given times.

    Returns the list of symmetric matrices M(t_i) = (A(t_i)+A(t_i)^T)/sqrt(2)
    where A has iid N(0, t/n) entries built from independent increments,
    so E tau(M(t)^2) = t (1 + 1/n).
    """
    _check_dim(n)
    ts = [float(v) for v in times]
    if any(v <= 0 for v in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
        raise DomainError("times must be positive and strictly increasing")
    rng = _rng(seed, rep)
    out = []
    A = np.zeros((n, n))
    prev = 0.0
    for t in ts:
        dt = t - prev
        A = A + rng.standard_normal((n, n)) * math.sqrt(dt / n)
        out.append((A + A.T) / math.sqrt(2.0))
        prev = t
    return out


def trace_state(M: np.ndarray) -> float:
    """Normalized trace (1/n) Tr M."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("trace_state needs a square matrix")
    return float(np.trace(M)) / M.shape[0]


def estimate_trace_moments(n: int, k_max: int, reps: int, seed: int = 0,
                           t: float = 1.0):
    """Mean and stderr of tau(M(t)^k) for k = 1..k_max over reps paths."""
    _check_dim(n)
    if not 1 <= k_max <= 12:
        raise DomainError("k_max must lie in 1..12")
    if reps < 2:
        raise DomainError("need reps >= 2 for a stderr")
    vals = np.empty((reps, k_max))
    for r in range(reps):
        (M,) = sample_matrix_bm(n, [t], seed=seed, rep=r)
        P = M
        for k in range(1, k_max + 1):
            vals[r, k - 1] = trace_state(P)
            if k < k_max:
                P = P @ M
    mean = vals.mean(axis=0)
    stderr = vals.std(axis=0, ddof=1) / math.sqrt(reps)
    return {k: (float(mean[k - 1]), float(stderr[k - 1]))
            for k in range(1, k_max + 1)}


def estimate_poly_moment(n: int, coeffs, reps: int, seed: int = 0,
                         t: float = 1.0) -> SimRow:
    """Mean and stderr of tau(P(M(t))) for a monomial polynomial P.

    coeffs lists c_0, c_1, ... lowest degree first.  The reference is
    the exact semicircle value sum_k c_k phi(S_t^k).
    """
    from .freecalc import semicircle_moment

    _check_dim(n)
    cs = [float(c) for c in coeffs]
    if not cs:
        raise DomainError("empty coefficient list")
    if reps < 2:
        raise DomainError("need reps >= 2 for a stderr")
    ref = sum(c * semicircle_moment(k, 0.0, t) for k, c in enumerate(cs))
    vals = np.empty(reps)
    for r in range(reps):
        (M,) = sample_matrix_bm(n, [t], seed=seed, rep=r)
        vals[r] = trace_state(_horner(cs, M))
    return SimRow("poly_moment", float(vals.mean()),
                  float(vals.std(ddof=1) / math.sqrt(reps)), float(ref),
                  meta={"n": n, "reps": reps, "t": t, "coeffs": cs})


def _horner(coeffs, M: np.ndarray) -> np.ndarray:
    """Evaluate a monomial polynomial at a square matrix."""
    n = M.shape[0]
    V = coeffs[-1] * np.eye(n)
    for c in coeffs[-2::-1]:
        V = V @ M + c * np.eye(n)
    return V


def asymptotic_freeness_check(n: int, reps: int, seed: int = 0,
                              intervals=((0.0, 1.0), (1.0, 2.0)),
                              polys=None):
    """Empirical test that disjoint matrix-BM increments are free.

    Freeness makes every alternating product of centered elements from
    the algebras of independent increments vanish in the trace state.
    The check builds one such product: poly j is evaluated on the j-th
    normalized increment, each factor is centered by subtracting the
    replication mean of its trace, and tau of the product is averaged
    over replications.  The default word multiplies the quadratic x^2
    on (0,1] with the quadratic on (1,2].

    Consecutive word positions must use distinct increments (that is
    what makes the product alternating), and two intervals may not
    partially overlap: increments of the same path are only independent
    when the intervals are disjoint.  Returns a one-row list whose
    reference value is the free limit 0.
    """
    _check_dim(n)
    if reps < 2:
        raise DomainError("need reps >= 2 for a stderr")
    ivs = [(float(a), float(b)) for a, b in intervals]
    if len(ivs) < 2:
        raise DomainError("need at least two increments for an alternating product")
    if polys is None:
        polys = [(0.0, 0.0, 1.0)] * len(ivs)
    polys = [[float(c) for c in p] for p in polys]
    if len(polys) != len(ivs):
        raise DomainError("need one polynomial per increment")
    for a, b in ivs:
        if not 0 <= a < b:
            raise DomainError("intervals must be increasing and nonnegative")
    for k in range(len(ivs) - 1):
        if ivs[k] == ivs[k + 1]:
            raise DomainError("alternation needs consecutive increments distinct")
    for i in range(len(ivs)):
        for j in range(i + 1, len(ivs)):
            if ivs[i] != ivs[j] and (max(ivs[i][0], ivs[j][0])
                                     < min(ivs[i][1], ivs[j][1])):
                raise DomainError(
                    "intervals overlap; freeness needs disjoint increments")
    times = sorted({v for ab in ivs for v in ab} - {0.0})
    idx = {v: i for i, v in enumerate(times)}

    def factors(r):
        path = sample_matrix_bm(n, times, seed=seed, rep=r)
        out = []
        for (a, b), cs in zip(ivs, polys):
            hi = path[idx[b]]
            lo = path[idx[a]] if a > 0 else 0.0
            out.append(_horner(cs, (hi - lo) / math.sqrt(b - a)))
        return out

    # Pass 1: replication-mean trace of every factor (the centering
    # constants). Pass 2 regenerates the same matrices by rep index.
    centers = np.zeros(len(ivs))
    for r in range(reps):
        for j, V in enumerate(factors(r)):
            centers[j] += trace_state(V)
    centers /= reps

    eye = np.eye(n)
    vals = np.empty(reps)
    for r in range(reps):
        prod = None
        for j, V in enumerate(factors(r)):
            V = V - centers[j] * eye
            prod = V if prod is None else prod @ V
        vals[r] = trace_state(prod)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(reps))
    return [SimRow("alternating_product", mean, stderr, 0.0,
                   meta={"n": n, "reps": reps, "intervals": ivs,
                         "polys": polys, "centers": centers.tolist()})]


def sample_correlated_family(model: CovarianceModel, length: int, n: int,
                             seed: int = 0, rep: int = 0):
    """length jointly semicircular n x n matrices with covariance rho.

    X_k = sum_j L_kj G_j with L the Cholesky factor of the Toeplitz
    covariance and G_j iid Wigner; each X_k is a unit Wigner matrix and
    tau(X_j X_k) -> rho(j-k).  Models whose Toeplitz matrix is not
    positive semidefinite at this length are rejected.
    """
    _check_dim(n)
    if not 1 <= length <= 4096:
        raise SizeError("family length must lie in 1..4096")
    C = toeplitz_cov(model, length)
    eig_min = float(np.linalg.eigvalsh(C)[0])
    if eig_min < -1e-6:
        raise DomainError("covariance model is not positive semidefinite at "
                          "length %d (min eigenvalue %.3g)" % (length, eig_min))
    Lf = np.linalg.cholesky(C + (1e-12 - min(eig_min, 0.0)) * np.eye(length))
    rng = _rng(seed, rep)
    G = rng.standard_normal((length, n, n)) / math.sqrt(n)
    G = (G + np.transpose(G, (0, 2, 1))) / math.sqrt(2.0)
    return np.einsum("kj,jab->kab", Lf, G)


def _ar1_path(rng, length: int, a: float) -> np.ndarray:
    """Stationary AR(1) with lag-1 coefficient a: the exact streaming
    form of the Toeplitz-Cholesky factor for the geometric model."""
    z0 = rng.standard_normal()
    if length == 1:
        return np.array([z0])
    eps = rng.standard_normal(length - 1) * math.sqrt(1 - a * a)
    rest, _ = signal.lfilter([1.0], [1.0, -a], eps, zi=np.array([a * z0]))
    return np.concatenate([[z0], rest])


def _banded_chol_paths(rng, length: int, model, reps_block: int):
    """Sample Gaussian paths via a banded Cholesky of the Toeplitz matrix."""
    lags = np.arange(length)
    rho = np.asarray(model.rho(lags), dtype=float)
    band = int(np.max(np.nonzero(np.abs(rho) > 1e-15)[0])) if length > 1 else 0
    band = min(band, length - 1)
    ab = np.zeros((band + 1, length))
    for d in range(band + 1):
        ab[band - d, d:] = rho[d] if d else 1.0
    try:
        cb = sla.cholesky_banded(ab, lower=False)
    except np.linalg.LinAlgError as exc:
        raise DomainError("covariance model is not positive definite at "
                          "length %d: %s" % (length, exc))
    eps = rng.standard_normal((length, reps_block))
    # solve L^T z = eps would give wrong marginal; we need z = L eps
    # with C = L L^T; cholesky_banded returns U with C = U^T U, L = U^T
    z = np.empty_like(eps)
    for i in range(length):
        lo = max(0, i - band)
        # L[i, j] = U[j, i] sits at cb[band + j - i, i] for j = lo..i
        col = cb[band - (i - np.arange(lo, i + 1)), i]
        z[i] = col @ eps[lo:i + 1]
    return z.T


def _apply_poly(vals: np.ndarray, expansion: TchebExpansion, basis: str):
    out = np.zeros_like(vals)
    for s, a in expansion.coeffs.items():
        if s == 0:
            continue
        fn = tcheb_u if basis == "tcheb" else hermite_h
        out += float(a) * fn(s, vals)
    return out


def simulate_limits(kind: str, model: CovarianceModel,
                    expansion: TchebExpansion, n: int, reps: int,
                    seed: int = 0, n_matrix: int = 40) -> list:
    """Empirical scaled second moment of sum_k Q(X_k) in the short-range
    regime, against the exact free/classical limit variances.

    kind="classical": scalar Gaussian paths (AR(1) streaming for the
    geometric model, banded Cholesky otherwise), Q read in the Hermite
    basis; reference is sum_s s! a_s^2 sum_k rho^s.

    kind="free": jointly semicircular matrix families of dimension
    n_matrix, Q read in the Tchebycheff basis under the trace state;
    reference is sum_s a_s^2 sum_k rho^s.  Matrix cost caps n at 4096.
    """
    if kind not in ("free", "classical"):
        raise DomainError("kind must be 'free' or 'classical', got %r" % kind)
    if expansion.rank is None:
        raise DomainError("expansion is constant; nothing to simulate")
    if reps < 2:
        raise DomainError("need reps >= 2 for a stderr")
    if n < 1:
        raise DomainError("n must be >= 1")
    cv = clt_variance(expansion, model)
    rows = []
    if kind == "classical":
        if n > MAX_LATTICE:
            raise SizeError("lattice length %d exceeds %d" % (n, MAX_LATTICE))
        vals = np.empty(reps)
        if isinstance(model, Geometric):
            for r in range(reps):
                z = _ar1_path(_rng(seed, r), n, model.a)
                vals[r] = float(np.sum(_apply_poly(z, expansion, "hermite")))
        else:
            block = 64
            r0 = 0
            while r0 < reps:
                nb = min(block, reps - r0)
                z = _banded_chol_paths(_rng(seed, r0), n, model, nb)
                for i in range(nb):
                    vals[r0 + i] = float(np.sum(
                        _apply_poly(z[i], expansion, "hermite")))
                r0 += nb
        ref = cv.classical
    else:
        if n > 4096:
            raise SizeError("free simulation caps the lattice at 4096")
        vals = np.empty(reps)
        for r in range(reps):
            fam = sample_correlated_family(model, n, n_matrix, seed=seed, rep=r)
            acc = np.zeros((n_matrix, n_matrix))
            for k in range(n):
                acc += _apply_poly_matrix(fam[k], expansion)
            vals[r] = trace_state(acc @ acc)
        ref = cv.free
    sq = vals ** 2 / n if kind == "classical" else vals / n
    est = float(sq.mean())
    stderr = float(sq.std(ddof=1) / math.sqrt(reps))
    rows.append(SimRow("scaled_second_moment", est, stderr, ref,
                       meta={"kind": kind, "n": n, "reps": reps}))
    rows.append(SimRow("limit_ratio_free_over_classical",
                       cv.free / cv.classical, None, None, meta={}))
    return rows


def _apply_poly_matrix(M: np.ndarray, expansion: TchebExpansion) -> np.ndarray:
    """Centered Q(M) by the three-term recursion: the constant basis
    term is dropped, mirroring _apply_poly (the limit theorems concern
    the mean-zero part of the functional)."""
    n = M.shape[0]
    out = np.zeros_like(M)
    smax = expansion.degree
    Um1 = np.eye(n)
    U = M.copy()
    for s in range(1, smax + 1):
        a = float(expansion.coefficient(s))
        if a:
            out += a * U
        Um1, U = U, M @ U - Um1
    return out
