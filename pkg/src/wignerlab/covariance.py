"""Stationary covariance models and slowly varying functions.

The models give rho(k), the covariance of a unit-variance stationary
sequence at lag k.  Four families:

    Delta                rho(0) = 1, zero elsewhere (free/classical iid)
    Geometric(a)         rho(k) = a^{|k|}, |a| < 1 (short range)
    PowerLaw(D, L)       rho(k) = |k|^{-D} L(|k|), long range when qD < 1
    Table({lag: value})  finite table, symmetric in the lag

Slowly varying factors L come in three shapes: Const(c), Log(offset)
= log(x + offset), and PowerOfLog(exponent, offset) = log(x+offset)^e.
The CLI token `loglog` maps to PowerOfLog(2).

A PowerLaw instance must still be a correlation sequence, so |rho| <= 1
is probed over a wide lag range at construction; growing L can break it
(log(k+1)/k^0.3 peaks above 1 near k = 28) and such combinations are
rejected.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TRUNCATION_DEFAULT = 10 ** 6


# ---------------------------------------------------------------- slowly varying

@dataclass(frozen=True)
class Const:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("Const level must be > 0, got %r" % (self.c,))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, self.c)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Log:
    offset: float = 1.0

    def __post_init__(self):
        if not self.offset >= 1:
            raise DomainError("Log offset must be >= 1, got %r" % (self.offset,))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.log(x + self.offset)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PowerOfLog:
    exponent: float
    offset: float = 1.0

    def __post_init__(self):
        if not self.offset >= 1:
            raise DomainError("PowerOfLog offset must be >= 1, got %r" % (self.offset,))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.log(x + self.offset) ** self.exponent
        return out if out.ndim else float(out)


SLOWLY_VARYING_KINDS = (Const, Log, PowerOfLog)


# ---------------------------------------------------------------- models

class CovarianceModel:
    """Base: vectorized rho(lags) with rho(0) = 1 and |rho| <= 1."""

    name = "abstract"

    def rho(self, lags):
        raise NotImplementedError

    def sum_rho_power(self, s: int, truncation: int = TRUNCATION_DEFAULT):
        """(sum_{k in Z} rho(k)^s, tail_bound) for integer s >= 1.

        Exact closed forms where available (Delta, Geometric, Table);
        PowerLaw truncates at |k| <= truncation and reports an
        integral-comparison bound on the neglected tail.  Divergent
        series raise DomainError.
        """
        raise NotImplementedError

    def describe(self) -> str:
        return self.name


class Delta(CovarianceModel):
    name = "delta"

    def rho(self, lags):
        k = np.asarray(lags)
        out = np.where(k == 0, 1.0, 0.0)
        return out if out.ndim else float(out)

    def sum_rho_power(self, s, truncation=TRUNCATION_DEFAULT):
        if s < 1:
            raise DomainError("power must be >= 1")
        return 1.0, 0.0


class Geometric(CovarianceModel):
    def __init__(self, a: float):
        a = float(a)
        if not abs(a) < 1:
            raise DomainError("geometric ratio must satisfy |a| < 1, got %r" % (a,))
        self.a = a
        self.name = "geometric:a=%g" % a

    def rho(self, lags):
        # integer exponents keep negative ratios exact
        k = np.abs(np.asarray(lags)).astype(np.int64)
        out = np.power(self.a, k)
        return out if out.ndim else float(out)

    def sum_rho_power(self, s, truncation=TRUNCATION_DEFAULT):
        if s < 1:
            raise DomainError("power must be >= 1")
        r = self.a ** s
        return 1.0 + 2.0 * r / (1.0 - r), 0.0


class PowerLaw(CovarianceModel):
    """rho(k) = |k|^{-D} L(|k|); long-range dependent when qD < 1."""

    def __init__(self, D: float, L=None):
        D = float(D)
        if not D > 0:
            raise DomainError("power-law exponent D must be > 0, got %r" % (D,))
        self.D = D
        self.L = L if L is not None else Const(1.0)
        if not isinstance(self.L, SLOWLY_VARYING_KINDS):
            raise DomainError("L must be Const, Log or PowerOfLog")
        self.name = "powerlaw:D=%g,L=%s" % (D, type(self.L).__name__.lower())
        probe = np.unique(np.concatenate(
            [np.arange(1, 100), np.geomspace(100, 10 ** 6, 200).astype(np.int64)]))
        vals = self.rho(probe)
        if np.max(np.abs(vals)) > 1 + 1e-12:
            k_bad = int(probe[int(np.argmax(np.abs(vals)))])
            raise DomainError(
                "rho(%d) = %.4f exceeds 1; %s is not a correlation sequence"
                % (k_bad, float(np.max(np.abs(vals))), self.name))

    def rho(self, lags):
        k = np.abs(np.asarray(lags, dtype=float))
        with np.errstate(divide="ignore"):
            out = np.where(k == 0, 1.0, np.where(k > 0, k, 1.0) ** (-self.D)
                           * self.L(np.where(k > 0, k, 1.0)))
        return out if out.ndim else float(out)

    def sum_rho_power(self, s, truncation=TRUNCATION_DEFAULT):
        if s < 1:
            raise DomainError("power must be >= 1")
        if s * self.D <= 1:
            raise DomainError(
                "sum of rho^%d diverges for D=%g (sD <= 1): this is the "
                "long-range regime, use the non-central normalization" % (s, self.D))
        k = np.arange(1, truncation + 1, dtype=float)
        val = 1.0 + 2.0 * float(np.sum((k ** (-self.D) * self.L(k)) ** s))
        # integral comparison: tail <= 2 int_T^inf (x^{-D} L(x))^s dx,
        # estimated with L frozen at the truncation point
        T = float(truncation)
        tail = 2.0 * (T ** (1 - s * self.D) / (s * self.D - 1)) * self.L(T) ** s
        return val, tail


class Table(CovarianceModel):
    """Finite covariance table keyed by non-negative lag."""

    def __init__(self, values: dict):
        vals = {}
        for k, v in values.items():
            k = int(k)
            vals[abs(k)] = float(v)
        if vals.get(0) != 1.0:
            raise DomainError("a covariance table must have rho(0) = 1")
        bad = [k for k, v in vals.items() if abs(v) > 1 + 1e-12]
        if bad:
            raise DomainError("table entries at lags %r exceed 1 in absolute value" % (bad,))
        self.values = vals
        self.max_lag = max(vals)
        self.name = "table(max_lag=%d)" % self.max_lag

    @classmethod
    def from_csv(cls, path: str) -> "Table":
        vals = {}
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() in ("lag", ""):
                    continue
                vals[int(row[0])] = float(row[1])
        return cls(vals)

    def rho(self, lags):
        k = np.abs(np.asarray(lags))
        flat = k.ravel()
        out = np.array([self.values.get(int(v), 0.0) for v in flat])
        out = out.reshape(k.shape)
        return out if out.ndim else float(out)

    def sum_rho_power(self, s, truncation=TRUNCATION_DEFAULT):
        if s < 1:
            raise DomainError("power must be >= 1")
        total = sum(v ** s if k == 0 else 2 * v ** s for k, v in self.values.items())
        return float(total), 0.0


# ---------------------------------------------------------------- grammar

def parse_slowly_varying(token: str):
    """`const`, `const:<c>`, `log` or `loglog` -> a SlowlyVarying."""
    token = token.strip().lower()
    if token == "const":
        return Const(1.0)
    if token.startswith("const:"):
        return Const(float(token.split(":", 1)[1]))
    if token == "log":
        return Log()
    if token == "loglog":
        return PowerOfLog(2.0)
    raise DomainError("unknown slowly-varying token %r" % (token,))


def parse_model(text: str) -> CovarianceModel:
    """Parse the covariance grammar used by the CLI.

    delta | geometric:a=<float> | powerlaw:D=<float>[,L=const[:c]|log|loglog]
    | table:<path>
    """
    text = text.strip()
    if text == "delta":
        return Delta()
    if text.startswith("geometric:"):
        body = text[len("geometric:"):]
        if not body.startswith("a="):
            raise DomainError("geometric model needs a=<float>, got %r" % (text,))
        return Geometric(float(body[2:]))
    if text.startswith("powerlaw:"):
        body = text[len("powerlaw:"):]
        D = None
        L = None
        for part in body.split(","):
            part = part.strip()
            if part.startswith("D="):
                D = float(part[2:])
            elif part.startswith("L="):
                L = parse_slowly_varying(part[2:])
            elif part:
                raise DomainError("unknown powerlaw field %r" % (part,))
        if D is None:
            raise DomainError("powerlaw model needs D=<float>, got %r" % (text,))
        return PowerLaw(D, L)
    if text.startswith("table:"):
        return Table.from_csv(text[len("table:"):])
    raise DomainError("cannot parse covariance model %r" % (text,))


def toeplitz_cov(model: CovarianceModel, n: int) -> np.ndarray:
    """Dense n x n Toeplitz covariance [rho(i-j)]."""
    from scipy.linalg import toeplitz

    first = model.rho(np.arange(n))
    return toeplitz(np.asarray(first, dtype=float))
