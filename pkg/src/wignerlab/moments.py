"""Exact and asymptotic joint moments of Tchebycheff partial sums.

The object of study is V_n(q, t) = sum_{k <= [nt]} U_q(X_k) for a
stationary semicircular sequence (X_k) with covariance rho.  Joint
moments factor over scalar contraction vectors:

    phi( prod_i U_{q_i}(X_{k_i}) ) = sum_{r in B(q)} prod_{i<j}
                                         rho(k_i - k_j)^{alpha_ij(r)}

so the exact joint moment is a lattice sum of products of powers of
rho.  The engine classifies each alpha pattern as a union of connected
pair-graphs and evaluates every component with the cheapest available
contraction (Toeplitz lag counting for pairs, chained matrix products
for paths/trees/cycles, a quartic loop for dense 4-vertex patterns,
brute-force meshes as a last resort) under an explicit work budget.

The limit side evaluates moments of the Hermite-rank-q limit process
(Rosenblatt-type for q = 2) by Monte Carlo or graded-panel quadrature
of singular Dirichlet-like integrals, plus the CLT/NCLT constants and
the Karamata slow-variation ratio.

Monte Carlo caveat: when some pair exponent exceeds 1/2 the integrand
is not square integrable; the reported stderr is then the in-sample
estimate of a formally infinite quantity.  With 10^6 samples it is
still a usable error indicator at the tolerances used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .combinat import enumerate_contractions
from .covariance import (CovarianceModel, Const, PowerLaw,  # noqa: F401
                         Delta, Geometric, Table, parse_model)
from .errors import DomainError, SizeError
from .poly import TchebExpansion

BUDGET_DEFAULT = 10 ** 9
MEM_CAP_ENTRIES = 3 * 10 ** 8


@dataclass(frozen=True)
class MomentResult:
    value: float
    method: str
    stderr: float | None = None
    n_samples: int | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MC:
    """Monte Carlo evaluation: plain uniform sampling over the time box."""

    samples: int = 10 ** 6
    seed: int = 0


@dataclass(frozen=True)
class Quadrature:
    """Graded-panel Gauss-Legendre evaluation; supports p <= 3."""

    level: int = 30


# ------------------------------------------------------------------ exact side

class _PowCache:
    """rho(|i-j|)^alpha matrices and lag tables for one model/call."""

    def __init__(self, model):
        self.model = model
        self._tables = {}

    def lag_table(self, alpha, max_lag):
        key = (alpha, max_lag)
        if key not in self._tables:
            lags = np.arange(max_lag + 1)
            self._tables[key] = np.asarray(self.model.rho(lags), dtype=float) ** alpha
        return self._tables[key]

    def matrix(self, alpha, n_rows, n_cols):
        if n_rows * n_cols > MEM_CAP_ENTRIES:
            raise SizeError("pair matrix %d x %d exceeds the memory cap"
                            % (n_rows, n_cols))
        table = self.lag_table(alpha, max(n_rows, n_cols) - 1)
        idx = np.abs(np.arange(n_rows)[:, None] - np.arange(n_cols)[None, :])
        return table[idx]


def _pair_sum_toeplitz(pows, n1, n2, alpha):
    """sum_{k<=n1, l<=n2} rho(k-l)^alpha via lag counting, O(n1+n2)."""
    d = np.arange(-(n2 - 1), n1)
    counts = np.minimum(n1, n2 + d) - np.maximum(1, 1 + d) + 1
    table = pows.lag_table(alpha, max(n1, n2) - 1)
    return float(np.sum(counts * table[np.abs(d)]))


def _components(p, alpha):
    """Connected components of the pair graph with alpha_ij > 0 edges."""
    adj = {i: set() for i in range(p)}
    for i in range(p):
        for j in range(i + 1, p):
            if alpha[i, j] > 0:
                adj[i].add(j)
                adj[j].add(i)
    seen, comps = set(), []
    for v in range(p):
        if v in seen:
            continue
        stack, comp = [v], []
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            comp.append(u)
            stack.extend(adj[u] - seen)
        comps.append((sorted(comp), adj))
    return comps


def _component_cost(comp, adj, alpha, sizes):
    verts = comp
    if len(verts) == 1:
        return sizes[verts[0]]
    if len(verts) == 2:
        return sizes[verts[0]] + sizes[verts[1]]
    degs = [len(adj[v]) for v in verts]
    nmax = max(sizes[v] for v in verts)
    if max(degs) <= 2:
        # path or cycle: chained matrix products
        return 2 * nmax ** 3 if min(degs) == 2 else len(verts) * nmax ** 2
    edges = sum(degs) // 2
    if edges == len(verts) - 1:
        return len(verts) * nmax ** 2      # tree
    if len(verts) == 4:
        return 2 * nmax ** 4               # dense 4-vertex loop
    prod = 1
    for v in verts:
        prod *= sizes[v]
    return prod                            # brute force


def _eval_component(comp, adj, alpha, sizes, pows):
    verts = comp
    if len(verts) == 1:
        return float(sizes[verts[0]])
    if len(verts) == 2:
        i, j = verts
        return _pair_sum_toeplitz(pows, sizes[i], sizes[j], alpha[i, j])
    degs = {v: len(adj[v]) for v in verts}
    edges = [(i, j) for i in verts for j in verts if i < j and alpha[i, j] > 0]

    def A(i, j):
        return pows.matrix(alpha[min(i, j), max(i, j)], sizes[i], sizes[j])

    if max(degs.values()) <= 2 and min(degs.values()) == 1:
        # simple path: fold a ones-vector through the chain
        ends = [v for v in verts if degs[v] == 1]
        order = [ends[0]]
        while len(order) < len(verts):
            nxt = [u for u in adj[order[-1]] if u not in order]
            order.append(nxt[0])
        w = np.ones(sizes[order[0]])
        for a, b in zip(order[:-1], order[1:]):
            w = A(b, a) @ w
        return float(w.sum())
    if max(degs.values()) == 2:
        # simple cycle: trace of the chained product
        order = [verts[0]]
        while len(order) < len(verts):
            nxt = [u for u in adj[order[-1]] if u not in order]
            order.append(nxt[0])
        M = A(order[0], order[1])
        for a, b in zip(order[1:-1], order[2:]):
            M = M @ A(a, b)
        closing = A(order[-1], order[0])
        return float(np.sum(M * closing.T))
    if len(edges) == len(verts) - 1:
        # tree: eliminate leaves into their parents
        w = {v: np.ones(sizes[v]) for v in verts}
        live = {v: set(adj[v]) for v in verts}
        todo = [v for v in verts if len(live[v]) == 1]
        removed = set()
        while todo:
            u = todo.pop()
            if u in removed or not live[u]:
                continue
            parent = next(iter(live[u]))
            w[parent] = w[parent] * (A(parent, u) @ w[u])
            removed.add(u)
            live[parent].discard(u)
            if len(live[parent]) == 1 and parent not in removed:
                todo.append(parent)
        root = [v for v in verts if v not in removed]
        return float(w[root[0]].sum())
    if len(verts) == 4:
        # dense pattern on 4 vertices: loop the last index
        a, b, c, d = verts

        def AA(i, j):
            # alpha may be zero inside a dense component's complement
            if alpha[min(i, j), max(i, j)] > 0:
                return A(i, j)
            return np.ones((sizes[i], sizes[j]))

        Aab, Aac, Abc = AA(a, b), AA(a, c), AA(b, c)
        Aad, Abd, Acd = AA(a, d), AA(b, d), AA(c, d)
        total = 0.0
        for kd in range(sizes[d]):
            inner = (Aac * Acd[:, kd][None, :]) @ Abc.T
            total += float(np.sum(Aab * inner * Aad[:, kd][:, None]
                                  * Abd[:, kd][None, :]))
        return total
    return _brute_mesh(verts, alpha, sizes, pows)


def _brute_mesh(verts, alpha, sizes, pows, mask_band=None, chunk=2 ** 20):
    """Direct lattice sum over the mesh, chunked; optional near-diagonal mask.

    mask_band=(band, keep_near) restricts to points with some pair at
    |k_i - k_j| <= band (keep_near=True) or all pairs beyond it.
    """
    dims = [sizes[v] for v in verts]
    total_pts = 1
    for d in dims:
        total_pts *= d
    pairs = [(ii, jj) for ii, v in enumerate(verts) for jj, u in enumerate(verts)
             if ii < jj]
    acc = 0.0
    for start in range(0, total_pts, chunk):
        stop = min(start + chunk, total_pts)
        flat = np.arange(start, stop)
        coords = np.array(np.unravel_index(flat, dims))
        vals = np.ones(stop - start)
        near = np.zeros(stop - start, dtype=bool)
        for ii, jj in pairs:
            diff = coords[ii] - coords[jj]
            a = alpha[verts[ii], verts[jj]]
            if a > 0:
                table = pows.lag_table(a, max(dims[ii], dims[jj]) - 1)
                vals *= table[np.abs(diff)]
            if mask_band is not None:
                near |= np.abs(diff) <= mask_band[0]
        if mask_band is not None:
            vals = np.where(near == mask_band[1], vals, 0.0)
        acc += float(np.sum(vals))
    return acc


def _validate_exact_args(q_list, t_list, n):
    q = tuple(int(v) for v in q_list)
    t = tuple(float(v) for v in t_list)
    if len(q) != len(t):
        raise DomainError("q_list and t_list must have equal length")
    if len(q) < 2:
        raise DomainError("need at least two factors (p >= 2)")
    if any(v < 1 for v in q):
        raise DomainError("polynomial orders must be >= 1")
    if any(v <= 0 for v in t):
        raise DomainError("times must be > 0")
    if n < 1:
        raise DomainError("n must be >= 1")
    return q, t


def exact_joint_moment(q_list, t_list, n: int, model: CovarianceModel,
                       budget: int = BUDGET_DEFAULT) -> MomentResult:
    """phi( prod_i V_n(q_i, t_i) ) evaluated exactly.

    Returns 0 immediately for odd total degree.  The work estimate
    (post fast-path) is checked against `budget`; exceeding it raises
    SizeError rather than starting a hopeless computation.
    """
    q, t = _validate_exact_args(q_list, t_list, n)
    sizes = [int(math.floor(n * ti)) for ti in t]
    meta = {"n": n, "sizes": sizes, "model": model.describe()}
    if sum(q) % 2 == 1:
        return MomentResult(0.0, "exact", meta=dict(meta, reason="odd total degree"))
    if min(sizes) < 1:
        return MomentResult(0.0, "exact", meta=dict(meta, reason="empty partial sum"))
    contractions = enumerate_contractions(q, scalar_only=True)
    if not contractions:
        return MomentResult(0.0, "exact", meta=dict(meta, reason="no scalar contraction"))

    # group identical alpha patterns
    patterns = {}
    for cv in contractions:
        key = tuple(cv.alpha[np.triu_indices(len(q), k=1)])
        patterns[key] = patterns.get(key, 0) + 1

    p = len(q)
    pows = _PowCache(model)
    cost = 0
    plans = []
    for key, mult in patterns.items():
        alpha = np.zeros((p, p), dtype=int)
        alpha[np.triu_indices(p, k=1)] = key
        comps = _components(p, alpha)
        for comp, adj in comps:
            cost += _component_cost(comp, adj, alpha, sizes)
        plans.append((alpha, mult, comps))
    if cost > budget:
        raise SizeError("estimated work %.3g exceeds budget %.3g; raise the "
                        "budget or reduce n" % (cost, budget))

    terms = []
    for alpha, mult, comps in plans:
        prod = 1.0
        for comp, adj in comps:
            prod *= _eval_component(comp, adj, alpha, sizes, pows)
        terms.append(mult * prod)
    value = math.fsum(terms)
    meta.update(patterns=len(plans), work_estimate=cost)
    return MomentResult(value, "exact", meta=meta)


def diagonal_mass(q: int, t_list, n: int, model: CovarianceModel,
                  band: int = 2, budget: int = BUDGET_DEFAULT) -> MomentResult:
    """Fraction of the exact joint moment carried near the diagonal.

    Near-diagonal means some pair with |k_i - k_j| <= band.  For p = 2
    this is an O(n) lag split; otherwise a masked mesh (budget-guarded).
    """
    p = len(t_list)
    qs, t = _validate_exact_args((q,) * p, t_list, n)
    sizes = [int(math.floor(n * ti)) for ti in t]
    if min(sizes) < 1:
        raise DomainError("partial sums are empty at this n")
    contractions = enumerate_contractions(qs, scalar_only=True)
    if not contractions:
        raise DomainError("no scalar contraction for this profile")
    pows = _PowCache(model)
    near = total = 0.0
    if p == 2:
        n1, n2 = sizes
        for cv in contractions:
            a = cv.alpha[0, 1]
            d = np.arange(-(n2 - 1), n1)
            counts = np.minimum(n1, n2 + d) - np.maximum(1, 1 + d) + 1
            table = pows.lag_table(a, max(n1, n2) - 1)[np.abs(d)]
            total += float(np.sum(counts * table))
            sel = np.abs(d) <= band
            near += float(np.sum(counts[sel] * table[sel]))
    else:
        pts = 1
        for s in sizes:
            pts *= s
        if pts > budget:
            raise SizeError("mesh of %d points exceeds budget %d" % (pts, budget))
        for cv in contractions:
            verts = list(range(p))
            total += _brute_mesh(verts, cv.alpha, sizes, pows)
            near += _brute_mesh(verts, cv.alpha, sizes, pows, mask_band=(band, True))
    if total == 0:
        raise DomainError("joint moment vanishes; diagonal share undefined")
    return MomentResult(near / total, "exact",
                        meta={"near": near, "total": total, "band": band})


# ------------------------------------------------------------------ limit side

def _limit_patterns(q: int, p: int, H: float):
    """(exponent matrices, prefactor) for the limit moment integrand."""
    if q < 1:
        raise DomainError("q must be >= 1")
    if q == 1:
        lo, hi = 0.0, 1.0
    else:
        lo, hi = 0.5, 1.0
    if not (lo < H < hi):
        raise DomainError("H must lie in (%g,%g) for q=%d, got %g" % (lo, hi, q, H))
    contractions = enumerate_contractions((q,) * p, scalar_only=True)
    mats = []
    for cv in contractions:
        e = cv.alpha * ((2 - 2 * H) / q)
        bad = np.argwhere(e >= 1.0)
        if bad.size:
            i, j = bad[0]
            raise DomainError(
                "pair (%d,%d) has exponent %.3f >= 1: the limit integrand is "
                "not integrable for q=%d, H=%g" % (i + 1, j + 1, e[i, j], q, H))
        mats.append(e)
    pref = (H * (2 * H - 1)) ** (p / 2)
    return mats, pref


def _mc_integrand(s, mats):
    """sum over patterns of prod_{i<j} |s_i-s_j|^{-e_ij}; s is (N, p)."""
    total = np.zeros(s.shape[0])
    p = s.shape[1]
    for e in mats:
        term = np.ones(s.shape[0])
        for i in range(p):
            for j in range(i + 1, p):
                if e[i, j] > 0:
                    term *= np.abs(s[:, i] - s[:, j]) ** (-e[i, j])
        total += term
    return total


def limit_joint_moment(q: int, H: float, t_list, method=None) -> MomentResult:
    """phi( prod_i R_{H,q}(t_i) ) for the limit process, normalized so
    that phi(R_{H,q}(t)^2) = t^{2H}.

    method is an MC(...) or Quadrature(...) instance (default MC()).
    Odd p (with odd q) gives 0; non-integrable pair exponents raise a
    DomainError naming the offending pair.
    """
    t = tuple(float(v) for v in t_list)
    if len(t) < 2:
        raise DomainError("need at least two time points")
    if any(v <= 0 for v in t):
        raise DomainError("times must be > 0")
    if method is None:
        method = MC()
    p = len(t)
    if (q * p) % 2 == 1:
        return MomentResult(0.0, "exact", meta={"reason": "odd total degree"})
    mats, pref = _limit_patterns(q, p, H)
    if not mats:
        return MomentResult(0.0, "exact", meta={"reason": "no scalar contraction"})
    if isinstance(method, MC):
        return _limit_mc(t, mats, pref, method)
    if isinstance(method, Quadrature):
        return _limit_quadrature(t, mats, pref, method)
    raise DomainError("method must be MC or Quadrature, got %r" % (method,))


def _limit_mc(t, mats, pref, mc: MC) -> MomentResult:
    p = len(t)
    vol = float(np.prod(t))
    n_total = int(mc.samples)
    if n_total < 1:
        raise DomainError("sample count must be >= 1")
    batch = 200_000
    s_sum = 0.0
    s_sq = 0.0
    done = 0
    b = 0
    while done < n_total:
        m = min(batch, n_total - done)
        rng = np.random.default_rng(np.random.SeedSequence(mc.seed, spawn_key=(b,)))
        s = rng.random((m, p)) * np.asarray(t)[None, :]
        g = _mc_integrand(s, mats)
        s_sum += float(g.sum())
        s_sq += float((g * g).sum())
        done += m
        b += 1
    mean = s_sum / n_total
    var = max(s_sq / n_total - mean * mean, 0.0)
    value = pref * vol * mean
    stderr = pref * vol * math.sqrt(var / n_total)
    return MomentResult(value, "mc", stderr=stderr, n_samples=n_total, seed=mc.seed,
                        meta={"prefactor": pref, "patterns": len(mats)})


def _graded_panels(T, level, toward_zero=True):
    """Geometric panels on (0, T] refining toward 0, ratio 1/2."""
    edges = [T * 2.0 ** (-k) for k in range(level + 1)]
    edges = np.array(edges[::-1])
    return edges


_GLX, _GLW = np.polynomial.legendre.leggauss(12)


def _gl_nodes(edges):
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    x = (mid[:, None] + half[:, None] * _GLX[None, :]).ravel()
    w = (half[:, None] * _GLW[None, :]).ravel()
    return x, w


def _limit_quadrature(t, mats, pref, quad: Quadrature) -> MomentResult:
    p = len(t)
    if p > 3:
        raise DomainError("quadrature supports p <= 3; use MC for p=%d" % p)
    level = int(quad.level)
    if level < 4:
        raise DomainError("quadrature level must be >= 4")
    total = 0.0
    if p == 2:
        t1, t2 = t
        for e in mats:
            b = e[0, 1]
            # integral over [0,t1]x[0,t2] of |s-u|^-b, via the lag variable
            for sgn, T in ((1.0, t1), (-1.0, t2)):
                edges = _graded_panels(T, level)
                # the overlap length has a kink at |t1 - t2|; make it a
                # panel edge or Gauss panels straddle a C^0 point
                kink = sgn * (t1 - t2)
                if 0.0 < kink < T:
                    edges = np.union1d(edges, [kink])
                x, w = _gl_nodes(edges)
                ell = np.minimum(t1, t2 + sgn * x) - np.maximum(0.0, sgn * x)
                ell = np.clip(ell, 0.0, None)
                total += float(np.sum(w * ell * x ** (-b)))
                # innermost stub [0, T 2^-level]: length is flat there
                h = edges[0]
                ell0 = min(t1, t2) if sgn > 0 else min(t1, t2)
                total += ell0 * h ** (1 - b) / (1 - b)
        return MomentResult(pref * total, "quadrature",
                            meta={"level": level, "patterns": len(mats)})
    # p == 3: decompose by orderings, gap variables u, v
    for e in mats:
        for perm in permutations(range(3)):
            ta, tb, tc = t[perm[0]], t[perm[1]], t[perm[2]]
            ea = e[min(perm[0], perm[1]), max(perm[0], perm[1])]
            eb = e[min(perm[1], perm[2]), max(perm[1], perm[2])]
            ec = e[min(perm[0], perm[2]), max(perm[0], perm[2])]
            U = min(tb, tc)
            edges_u = _graded_panels(U, level)
            for cand in (tb - ta, tc - ta, tc - tb):
                if 0.0 < cand < U:
                    edges_u = np.union1d(edges_u, [cand])
            xu, wu = _gl_nodes(edges_u)
            for u, w_u in zip(xu, wu):
                V = min(tc - u, tc)
                if V <= 0:
                    continue
                edges_v = _graded_panels(V, level)
                for cand in (tc - u - ta, tc - tb):
                    if 0.0 < cand < V:
                        edges_v = np.union1d(edges_v, [cand])
                xv, wv = _gl_nodes(edges_v)
                base = np.minimum(ta, np.minimum(tb - u, tc - u - xv))
                ell = np.clip(base, 0.0, None)
                total += w_u * float(np.sum(
                    wv * ell * u ** (-ea) * xv ** (-eb) * (u + xv) ** (-ec)))
    return MomentResult(pref * total, "quadrature",
                        meta={"level": level, "patterns": len(mats)})


# ------------------------------------------------------------------ CLT / NCLT

@dataclass(frozen=True)
class CLTVariance:
    free: float
    classical: float
    per_term: dict
    tail_bound: float
    truncation: int


def clt_variance(expansion: TchebExpansion, model: CovarianceModel,
                 truncation: int = 10 ** 6) -> CLTVariance:
    """Limit variances of V_n(Q, 1)/sqrt(n) in the short-range regime.

    free      = sum_s a_s^2 sum_k rho(k)^s
    classical = sum_s s! a_s^2 sum_k rho(k)^s   (same coefficients read
                against the Hermite basis; the transfer-principle factor
                is the s!)

    The constant term a_0 does not enter (the sums are centered).
    PowerLaw models need rank * D > 1, otherwise the variance diverges
    and the non-central normalization applies instead.
    """
    if expansion.rank is None:
        raise DomainError("expansion is constant; no fluctuation to normalize")
    per_term = {}
    free = classical = tail = 0.0
    for s in sorted(k for k in expansion.coeffs if k >= 1):
        a = float(expansion.coeffs[s])
        sigma2, tbound = model.sum_rho_power(s, truncation)
        per_term[s] = {"a": a, "sum_rho_pow": sigma2, "tail_bound": tbound}
        free += a * a * sigma2
        classical += math.factorial(s) * a * a * sigma2
        tail += a * a * tbound
    return CLTVariance(free=free, classical=classical, per_term=per_term,
                       tail_bound=tail, truncation=truncation)


@dataclass(frozen=True)
class NCLTConstants:
    H: float
    limit_coeff: float
    normalization: float | None


def nclt_constants(q: int, D: float, L=None, n: int | None = None,
                   a_q: float = 1.0) -> NCLTConstants:
    """Normalization and limit coefficient in the long-range regime.

    Requires 0 < D < 1/q (strict: the critical case D = 1/q is out of
    scope).  The scaled sum V_n / (n^{1-qD/2} L(n)^{q/2}) converges to
    limit_coeff * R_{H,q} with H = 1 - qD/2 and
    limit_coeff = a_q / sqrt((1 - qD/2)(1 - qD)).
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    if not 0 < D:
        raise DomainError("D must be > 0")
    if D >= 1.0 / q:
        raise DomainError(
            "D=%g is not below 1/q=%g: NCLT normalization requires qD < 1 "
            "(the critical case is excluded)" % (D, 1.0 / q))
    L = L if L is not None else Const(1.0)
    H = 1 - q * D / 2
    coeff = a_q / math.sqrt((1 - q * D / 2) * (1 - q * D))
    norm = None
    if n is not None:
        if n < 1:
            raise DomainError("n must be >= 1")
        norm = n ** (1 - q * D / 2) * float(L(float(n))) ** (q / 2)
    return NCLTConstants(H=H, limit_coeff=coeff, normalization=norm)


def karamata_ratio(q: int, D: float, n: int, L=None, t: float = 1.0) -> float:
    """sum_{j<=[nt]} j^{-qD} L(j)^q over its Karamata equivalent.

    The equivalent is [nt]^{1-qD} L([nt])^q / (1-qD); the ratio tends
    to 1 whenever qD < 1.  At n = t = 1 it equals 1 - qD exactly.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    if not 0 < q * D < 1:
        raise DomainError("karamata ratio needs 0 < qD < 1, got qD=%g" % (q * D,))
    L = L if L is not None else Const(1.0)
    N = int(math.floor(n * t))
    if N < 1:
        raise DomainError("[nt] must be >= 1")
    num = 0.0
    chunk = 5 * 10 ** 6
    for start in range(1, N + 1, chunk):
        j = np.arange(start, min(start + chunk, N + 1), dtype=float)
        num += float(np.sum(j ** (-q * D) * np.asarray(L(j), dtype=float) ** q))
    den = N ** (1 - q * D) * float(L(float(N))) ** q / (1 - q * D)
    return num / den
