"""The quaternary polynomials alpha, alpha1, alpha2 and their representation numbers.

Each polynomial is a sum of four terms c * g(x_i) with g either the square
x^2 or the triangular number T(x) = x(x+1)/2:

    alpha  = T(x1) + T(x2) + 2 T(x3) + 4 T(x4)
    alpha1 = x1^2 + 2 x2^2 + 4 T(x3) + 4 T(x4)
    alpha2 = x1^2 + 2 T(x2) + 2 T(x3) + 4 T(x4)

Counting goes through the distinct values of each coordinate: T(x) = T(-1-x)
gives every triangular value two preimages, and every nonzero square two.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator

import numpy as np

from heckepoly.arith import MultiplicativeTables
from heckepoly.errors import InvalidArgument, check_budget

_TERMS = {
    "alpha": ((1, "tri"), (1, "tri"), (2, "tri"), (4, "tri")),
    "alpha1": ((1, "sq"), (2, "sq"), (4, "tri"), (4, "tri")),
    "alpha2": ((1, "sq"), (2, "tri"), (2, "tri"), (4, "tri")),
}
KINDS = tuple(_TERMS)


def _base(kind: str, x: int) -> int:
    return x * x if kind == "sq" else x * (x + 1) // 2


@dataclass(frozen=True)
class PolynomialSpec:
    kind: str

    def __post_init__(self):
        if self.kind not in _TERMS:
            raise InvalidArgument(f"unknown polynomial {self.kind!r}; choose from {KINDS}")

    @property
    def terms(self) -> tuple[tuple[int, str], ...]:
        return _TERMS[self.kind]

    def __call__(self, x) -> int:
        return poly_value(self, x)

    def coordinate_range(self, i: int, bound: int) -> range:
        """Integers x with coef_i * g_i(x) <= bound, in increasing order."""
        coef, kind = self.terms[i]
        if bound < 0:
            return range(0)
        top = bound // coef
        if kind == "sq":
            r = math.isqrt(top)
            return range(-r, r + 1)
        # largest t >= 0 with t(t+1)/2 <= top
        t = (math.isqrt(8 * top + 1) - 1) // 2
        return range(-t - 1, t + 1)

    def coordinate_values(self, i: int, bound: int) -> tuple[np.ndarray, np.ndarray]:
        """Distinct values coef_i * g_i(x) <= bound with their number of preimages x."""
        coef, kind = self.terms[i]
        top = bound // coef
        if kind == "sq":
            base = np.arange(math.isqrt(top) + 1, dtype=np.int64) ** 2
            mult = np.full(base.shape, 2, dtype=np.int64)
            mult[0] = 1
        else:
            t = np.arange((math.isqrt(8 * top + 1) - 1) // 2 + 1, dtype=np.int64)
            base = t * (t + 1) // 2
            mult = np.full(base.shape, 2, dtype=np.int64)
        return coef * base, mult


_MAX_COORD = 3 * 10**9  # keeps every value below 2^63


def poly_value(spec: PolynomialSpec, x) -> int:
    """Exact value of the polynomial at an integer 4-tuple."""
    if len(x) != 4:
        raise InvalidArgument(f"need a 4-tuple, got {x!r}")
    if any(abs(int(v)) > _MAX_COORD for v in x):
        raise InvalidArgument("coordinates too large for a 63-bit value")
    return sum(c * _base(kind, int(v)) for (c, kind), v in zip(spec.terms, x))


@dataclass(frozen=True)
class RepTable:
    spec: PolynomialSpec
    limit: int
    counts: np.ndarray

    def __post_init__(self):
        self.counts.setflags(write=False)


def _convolve_sparse(dense: np.ndarray, values: np.ndarray, mult: np.ndarray, limit: int) -> np.ndarray:
    out = np.zeros(limit + 1, dtype=np.int64)
    for v, m in zip(values.tolist(), mult.tolist()):
        if v > limit:
            break
        out[v:] += m * dense[: limit + 1 - v]
    return out


def rep_counts(spec: PolynomialSpec, limit: int, threads: int = 1, budget: int | None = None) -> RepTable:
    """counts[n] = #{x in Z^4 : spec(x) = n} for n = 0..limit.

    The inner three coordinates are combined first; the outermost coordinate's
    values are split across ``threads`` workers and the integer partial counts
    summed, so the result does not depend on the partition.
    """
    if limit < 0:
        raise InvalidArgument(f"limit must be >= 0, got {limit}")
    check_budget(8 * (limit + 1) * (3 + max(1, threads)), f"representation counts to {limit}", budget)
    inner = np.zeros(limit + 1, dtype=np.int64)
    inner[0] = 1
    for i in (3, 2, 1):
        vals, mult = spec.coordinate_values(i, limit)
        inner = _convolve_sparse(inner, vals, mult, limit)
    vals, mult = spec.coordinate_values(0, limit)
    workers = max(1, threads)
    chunks = [(vals[k::workers], mult[k::workers]) for k in range(workers)]
    if workers == 1:
        parts = [_convolve_sparse(inner, *chunks[0], limit)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _convolve_sparse(inner, c[0], c[1], limit), chunks))
    counts = np.sum(parts, axis=0, dtype=np.int64)
    return RepTable(spec=spec, limit=limit, counts=counts)


def enumerate_values(spec: PolynomialSpec, bound: int) -> Iterator[tuple[int, tuple[int, int, int, int]]]:
    """Every x in Z^4 with spec(x) + 1 <= bound, once each, in lexicographic order.

    Yields (spec(x), x).
    """
    budget = bound - 1
    if budget < 0:
        return
    (c1, k1), (c2, k2), (c3, k3), (c4, k4) = spec.terms
    for x1 in spec.coordinate_range(0, budget):
        v1 = c1 * _base(k1, x1)
        if v1 > budget:
            continue
        for x2 in spec.coordinate_range(1, budget - v1):
            v2 = v1 + c2 * _base(k2, x2)
            if v2 > budget:
                continue
            for x3 in spec.coordinate_range(2, budget - v2):
                v3 = v2 + c3 * _base(k3, x3)
                if v3 > budget:
                    continue
                for x4 in spec.coordinate_range(3, budget - v3):
                    v = v3 + c4 * _base(k4, x4)
                    if v <= budget:
                        yield v, (x1, x2, x3, x4)


@dataclass(frozen=True)
class RepIdentityReport:
    """Outcome of checking counts[n-1] = c * sigma(n) for 1 <= n <= limit + 1.

    ``c`` is measured at n = 1.  ``first_failure`` is (n, counts[n-1], sigma(n)).
    """

    spec: str
    limit: int
    c: Fraction | None
    inconsistencies: int
    first_failure: tuple[int, int, int] | None

    @property
    def ok(self) -> bool:
        return self.c is not None and self.inconsistencies == 0

    def summary(self) -> str:
        if self.c is None:
            n, cnt, sig = self.first_failure
            return f"{self.spec}: no positive constant (n = {n}: count {cnt}, sigma {sig})"
        msg = f"{self.spec}: c = {self.c}, {self.inconsistencies} inconsistencies up to n = {self.limit + 1}"
        if self.first_failure:
            n, cnt, sig = self.first_failure
            msg += f"; first at n = {n} (count {cnt}, sigma {sig})"
        return msg


def verify_rep_identity(table: RepTable, tables: MultiplicativeTables) -> RepIdentityReport:
    """Measure the constant c with counts[n-1] = c * sigma(n) and check it for every n."""
    if table.limit < 1:
        raise InvalidArgument("need a counts table with limit >= 1")
    if tables.limit < table.limit + 1:
        raise InvalidArgument(f"sigma table needs limit >= {table.limit + 1}")
    counts = table.counts
    sigma = tables.sigma[1 : table.limit + 2]
    name = table.spec.kind
    if counts[0] <= 0:
        return RepIdentityReport(name, table.limit, None, 1, (1, int(counts[0]), int(sigma[0])))
    c = Fraction(int(counts[0]), int(sigma[0]))
    # counts[n-1] * den == num * sigma(n), exactly in int64
    bad = np.flatnonzero(counts * c.denominator != c.numerator * sigma)
    first = None
    if bad.size:
        i = int(bad[0])
        first = (i + 1, int(counts[i]), int(sigma[i]))
    return RepIdentityReport(name, table.limit, c, int(bad.size), first)


def export_csv(table: RepTable, tables: MultiplicativeTables, path: str | Path) -> None:
    """Rows (n, counts[n], sigma(n+1), ratio) for n = 0..limit."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "delta4", "sigma_n_plus_1", "ratio"])
        for n in range(table.limit + 1):
            cnt, sig = int(table.counts[n]), int(tables.sigma[n + 1])
            w.writerow([n, cnt, sig, str(Fraction(cnt, sig)) if sig else ""])
