"""Square-free power moments S_r(X) and empirical checks of their growth.

    S_r(X) = sum over x in Z^4 with alpha(x) + 1 <= X square-free of lambda(alpha(x) + 1)^r

is computed two ways: from the lattice counts (``lattice``) and from the
twisted divisor sum sigma that the counts are proportional to (``sieve``).
All float sums are correctly rounded (``math.fsum``), so they do not depend
on the order or partition in which terms are produced.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

import numpy as np

from heckepoly.arith import MultiplicativeTables
from heckepoly.eigenform import EigenformTable
from heckepoly.errors import InvalidArgument
from heckepoly.lattice import PolynomialSpec, rep_counts, verify_rep_identity


def checkpoint_schedule(start: float = 3.0, stop: float = 6.0, per_decade: int = 8) -> list[int]:
    """X = ceil(10^(start + k / per_decade)) for k = 0 .. (stop - start) * per_decade."""
    steps = round((stop - start) * per_decade)
    out = []
    for k in range(steps + 1):
        x = math.ceil(round(10 ** (start + k / per_decade), 6))
        if not out or x > out[-1]:
            out.append(x)
    return out


@dataclass
class MomentSeries:
    r: int
    method: str
    weight: int
    checkpoints: list[tuple[int, float]]
    normalization: float = 1.0
    raw: list[float] = field(default_factory=list)

    def __post_init__(self):
        xs = [x for x, _ in self.checkpoints]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise InvalidArgument("checkpoints must be strictly increasing in X")

    @property
    def xs(self) -> np.ndarray:
        return np.array([x for x, _ in self.checkpoints], dtype=np.float64)

    @property
    def values(self) -> np.ndarray:
        return np.array([s for _, s in self.checkpoints], dtype=np.float64)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["r", "method", "X", "S", "normalization"])
            for x, s in self.checkpoints:
                w.writerow([self.r, self.method, x, repr(float(s)), repr(float(self.normalization))])


def _check_range(X: int, tables: MultiplicativeTables, eigenform: EigenformTable):
    if X < 1:
        raise InvalidArgument(f"X must be >= 1, got {X}")
    if X > eigenform.limit or X > tables.limit:
        raise InvalidArgument(f"X = {X} exceeds table limits ({eigenform.limit}, {tables.limit})")


def _terms(r: int, X: int, tables, eigenform, threads: int = 1) -> np.ndarray:
    """lambda(n)^r sigma(n) on square-free n <= X, zero elsewhere (index 0 unused)."""
    def segment(bounds):
        lo, hi = bounds
        lam = eigenform.lambdas[lo:hi]
        return np.where(tables.squarefree[lo:hi], lam**r * tables.sigma[lo:hi], 0.0)

    edges = np.linspace(1, X + 1, max(1, threads) + 1).astype(int)
    spans = list(zip(edges[:-1], edges[1:]))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(segment, spans))
    else:
        parts = [segment(s) for s in spans]
    return np.concatenate([[0.0]] + parts)


def moment_sum_sieve(r: int, X: int, tables: MultiplicativeTables, eigenform: EigenformTable) -> float:
    """sum over square-free n <= X of lambda(n)^r sigma(n)."""
    if r < 1:
        raise InvalidArgument(f"r must be >= 1, got {r}")
    _check_range(X, tables, eigenform)
    return math.fsum(_terms(r, X, tables, eigenform).tolist())


def moment_series_sieve(r: int, xs: list[int], tables, eigenform, threads: int = 1) -> MomentSeries:
    if r < 1:
        raise InvalidArgument(f"r must be >= 1, got {r}")
    _check_range(max(xs), tables, eigenform)
    terms = _terms(r, max(xs), tables, eigenform, threads).tolist()
    points = [(x, math.fsum(terms[: x + 1])) for x in xs]
    return MomentSeries(r=r, method="sieve", weight=eigenform.weight, checkpoints=points)


@dataclass(frozen=True)
class LatticeMoment:
    raw: float
    normalized: float
    c: Fraction


def _lattice_setup(X: int, spec, tables, eigenform, threads):
    _check_range(X, tables, eigenform)
    # limit >= 1 so that c can be measured even when only alpha(x) = 0 is in range
    counts = rep_counts(spec, max(X - 1, 1), threads=threads)
    if tables.limit >= counts.limit + 1:
        c = verify_rep_identity(counts, tables).c
    else:
        c = Fraction(int(counts.counts[0]), int(tables.sigma[1]))
    if c is None:
        raise InvalidArgument(f"{spec.kind}: no representations of 0, cannot normalize")
    return counts.counts, c


def moment_sum_lattice(r: int, X: int, tables: MultiplicativeTables, eigenform: EigenformTable,
                       spec: PolynomialSpec | None = None, threads: int = 1) -> LatticeMoment:
    """Lattice-side S_r(X): sum over points x of lambda(spec(x) + 1)^r, square-free values only.

    Points are counted by value (see :func:`heckepoly.lattice.rep_counts`); the
    result is reported raw and divided by the measured proportionality constant c.
    """
    if r < 1:
        raise InvalidArgument(f"r must be >= 1, got {r}")
    spec = spec or PolynomialSpec("alpha")
    counts, c = _lattice_setup(X, spec, tables, eigenform, threads)
    n = np.arange(1, X + 1)
    weights = np.where(tables.squarefree[1 : X + 1], eigenform.lambdas[1 : X + 1] ** r, 0.0)
    raw = math.fsum((counts[n - 1] * weights).tolist())
    return LatticeMoment(raw=raw, normalized=raw / float(c), c=c)


def moment_series_lattice(r: int, xs: list[int], tables, eigenform, spec: PolynomialSpec | None = None,
                          threads: int = 1) -> MomentSeries:
    spec = spec or PolynomialSpec("alpha")
    X = max(xs)
    counts, c = _lattice_setup(X, spec, tables, eigenform, threads)
    weights = np.where(tables.squarefree[1 : X + 1], eigenform.lambdas[1 : X + 1] ** r, 0.0)
    terms = (counts[:X] * weights).tolist()
    raws = [math.fsum(terms[:x]) for x in xs]
    points = [(x, raw / float(c)) for x, raw in zip(xs, raws)]
    return MomentSeries(r=r, method="lattice", weight=eigenform.weight, checkpoints=points,
                        normalization=float(c), raw=raws)


# -- predictions -------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticPrediction:
    r: int
    d_r: int | None
    gamma_r: float
    error_exponent: float
    flags: tuple[str, ...] = ()
    # pole order of L_r at s = 2 minus one: multiplicity of zeta(s-1) in L_r
    pole_order_degree: int | None = None

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "d_r": self.d_r,
            "pole_order_degree": self.pole_order_degree,
            "gamma_r": self.gamma_r,
            "error_exponent": self.error_exponent,
            "flags": list(self.flags),
        }


def _binom(a: int, b: int) -> int:
    return comb(a, b) if b >= 0 else 0


def _tail_sum(m: int, top: int, upper: int, shift: int) -> Fraction:
    """sum_{n=0}^{top} (shift - 2n)^2 / n * C(upper, n - 1), summand 0 where the binomial is 0."""
    total = Fraction(0)
    for n in range(top + 1):
        b = _binom(upper, n - 1)
        if b:
            total += Fraction((shift - 2 * n) ** 2 * b, n)
    return total


def predicted_exponents(r: int) -> AsymptoticPrediction:
    """Degree d_r of the log-polynomial main term and the exponent gamma_r for r >= 3."""
    if r < 3:
        raise InvalidArgument(f"predictions cover r >= 3, got {r}")
    flags = ["n=0 summand taken as 0 (vanishing binomial)"]
    if r % 2 == 0:
        m = r // 2
        d = Fraction(comb(r, m), m) - 1
        gamma = (Fraction(13, 82 * m) * _binom(2 * m, m - 1)
                 + Fraction(15, 8 * (m - 1)) * _binom(2 * m, m - 2)
                 + Fraction(1, 4) * _tail_sum(m, m - 2, 2 * m, 2 * m + 1))
        d_r = int(d) if d.denominator == 1 else None
        if d_r is None:
            flags.append(f"d_r = {d} is not an integer")
    else:
        m = (r - 1) // 2
        gamma = (Fraction(2, 3 * m) * _binom(2 * m + 1, m - 1)
                 + Fraction(1, 4) * _tail_sum(m, m - 1, 2 * m + 1, 2 * m + 2)
                 - Fraction(5, 6))
        d_r = None
    if gamma < 0:
        flags.append("gamma_r negative: error exponent below the trivial bound")
    g = float(gamma)
    pole = comb(r, r // 2) - _binom(r, r // 2 - 1) - 1 if r % 2 == 0 else None
    return AsymptoticPrediction(r=r, d_r=d_r, gamma_r=g, error_exponent=2 - 1 / (2 * (1 + g)),
                                flags=tuple(flags), pole_order_degree=pole)


# -- fitting -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    n_points: int


def _window(series: MomentSeries, window):
    xs, ss = series.xs, series.values
    if window is not None:
        lo, hi = window
        keep = (xs >= lo) & (xs <= hi)
        xs, ss = xs[keep], ss[keep]
    return xs, ss


def growth_exponent(series: MomentSeries, window: tuple[float, float] | None = None) -> SlopeFit:
    """Least-squares slope of log|S| against log X over the checkpoints in ``window``."""
    xs, ss = _window(series, window)
    keep = ss != 0
    xs, ss = xs[keep], ss[keep]
    if xs.size < 5:
        raise InvalidArgument(f"need >= 5 nonzero checkpoints in window, have {xs.size}")
    lx, ly = np.log(xs), np.log(np.abs(ss))
    design = np.column_stack([lx, np.ones_like(lx)])
    coef, res, *_ = np.linalg.lstsq(design, ly, rcond=None)
    dof = xs.size - 2
    resid = ly - design @ coef
    sigma2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return SlopeFit(slope=float(coef[0]), stderr=math.sqrt(cov[0, 0]), n_points=int(xs.size))


@dataclass(frozen=True)
class MainTermFit:
    C_hat: float
    stderr: float
    ci: tuple[float, float]
    residual_power: float | None
    window: tuple[float, float]
    n_points: int

    def to_dict(self) -> dict:
        return {
            "C_hat": self.C_hat,
            "stderr": self.stderr,
            "ci95": list(self.ci),
            "residual_power": self.residual_power,
            "window": list(self.window),
            "n_points": self.n_points,
        }


def fit_main_term(series: MomentSeries, window: tuple[float, float] | None = None) -> MainTermFit:
    """Fit S(X) = C X^2 by least squares.

    The default window is the largest decade of X in the series.  The residual
    power is the log-log slope of |S - C X^2| over the same window.
    """
    if series.r % 2:
        raise InvalidArgument("odd r has no X^2 main term")
    if window is None:
        top = float(series.xs.max())
        window = (top / 10, top)
    xs, ss = _window(series, window)
    if xs.size < 8:
        raise InvalidArgument(f"need >= 8 checkpoints in window, have {xs.size}")
    basis = xs**2
    C = float(basis @ ss / (basis @ basis))
    resid = ss - C * basis
    dof = xs.size - 1
    stderr = math.sqrt(float(resid @ resid) / dof / float(basis @ basis))
    residual_power = None
    nz = resid != 0
    if np.count_nonzero(nz) >= 2:
        residual_power = float(np.polyfit(np.log(xs[nz]), np.log(np.abs(resid[nz])), 1)[0])
    return MainTermFit(C_hat=C, stderr=stderr, ci=(C - 1.96 * stderr, C + 1.96 * stderr),
                       residual_power=residual_power, window=(float(window[0]), float(window[1])),
                       n_points=int(xs.size))


def log_polynomial_degree(series: MomentSeries, window: tuple[float, float] | None = None,
                          max_degree: int = 3) -> dict:
    """Fit S / X^2 as polynomials in log X of increasing degree; report each fit's RMS residual.

    Used to see which degree the data support; only meaningful for even r.
    """
    xs, ss = _window(series, window)
    lx, y = np.log(xs), ss / xs**2
    out = {}
    for d in range(max_degree + 1):
        if xs.size <= d + 1:
            break
        coef = np.polyfit(lx, y, d)
        resid = y - np.polyval(coef, lx)
        out[d] = {"coefficients": coef.tolist(), "rms": float(np.sqrt(np.mean(resid**2)))}
    return out


def compare_constant(C_hat: float, C: float, tolerance: float = 0.15) -> dict:
    """Relative distance of the fitted constant to C and C/2; picks the closer one."""
    rel_full = abs(C_hat - C) / abs(C)
    rel_half = abs(C_hat - C / 2) / abs(C / 2)
    best, rel = ("C/2", rel_half) if rel_half < rel_full else ("C", rel_full)
    return {
        "C": C,
        "C_hat": C_hat,
        "rel_diff_C": rel_full,
        "rel_diff_C_half": rel_half,
        "best_match": best,
        "within_tolerance": rel <= tolerance,
        "tolerance": tolerance,
    }
