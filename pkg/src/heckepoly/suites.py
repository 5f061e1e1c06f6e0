"""Verification suites run by ``heckepoly verify`` and the acceptance tests.

Each suite returns a :class:`SuiteResult` with a pass flag and a details dict
that is safe to serialize as JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from heckepoly.arith import MultiplicativeTables
from heckepoly.eigenform import EigenformTable, verify_deligne, verify_hecke_range
from heckepoly.lattice import PolynomialSpec, rep_counts, verify_rep_identity
from heckepoly.sympow import (
    SatakeLocal,
    chebyshev_A,
    chebyshev_u_recurrence,
    decomposition_exponents,
    sym_lambda_p,
)


@dataclass
class SuiteResult:
    name: str
    ok: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        body = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"[{status}] {self.name}: {body}"


def hecke_suite(table: EigenformTable, max_product: int) -> SuiteResult:
    max_product = min(max_product, table.limit)
    failures = verify_hecke_range(table, max_product)
    return SuiteResult("hecke", not failures, {
        "weight": table.weight,
        "max_product": max_product,
        "failures": len(failures),
        "first_failure": list(failures[0]) if failures else None,
    })


def deligne_suite(table: EigenformTable, tables: MultiplicativeTables, limit: int) -> SuiteResult:
    limit = min(limit, table.limit, tables.limit)
    bad = verify_deligne(table, limit, tables.divcount)
    worst = float(np.max(np.abs(table.lambdas[1 : limit + 1]) / tables.divcount[1 : limit + 1]))
    return SuiteResult("deligne", bad is None, {
        "weight": table.weight,
        "limit": limit,
        "first_violation": bad,
        "max_ratio": worst,
    })


def chebyshev_suite(max_ell: int = 12, samples: int = 200, seed: int = 0, tol: float = 1e-8) -> SuiteResult:
    """x^ell = sum_j A_{ell,j} U_j(x/2) at random x in [-2, 2], and 2^ell = sum_j A_{ell,j} (j+1).

    A_{ell,j} multiplies the degree-j polynomial; pairing it with degree ell - j
    fails already at ell = 3.
    """
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-2.0, 2.0, samples)
    worst = 0.0
    count_ok = True
    for ell in range(max_ell + 1):
        rebuilt = sum(chebyshev_A(ell, j) * chebyshev_u_recurrence(j, xs) for j in range(ell + 1))
        worst = max(worst, float(np.max(np.abs(rebuilt - xs**ell) / np.maximum(1.0, np.abs(xs) ** ell))))
        count_ok &= 2**ell == sum(chebyshev_A(ell, j) * (j + 1) for j in range(ell + 1))
    return SuiteResult("chebyshev", worst < tol and count_ok, {
        "max_ell": max_ell,
        "samples": samples,
        "max_rel_error": worst,
        "count_identity": count_ok,
    })


def fcrel_suite(table: EigenformTable, tables: MultiplicativeTables, max_prime: int = 1000,
                max_r: int = 10, tol: float = 1e-8) -> SuiteResult:
    """lambda(p)^r against sum_n (C(r,n) - C(r,n-1)) lambda(p^{r-2n}).

    lambda(p^m) is read from the table when p^m is in range and otherwise taken
    from the Satake recurrence.  Errors are measured as |diff| / max(1, |lambda(p)^r|).
    """
    primes = [int(p) for p in tables.primes if p <= min(max_prime, table.limit)]
    worst = 0.0
    from_table = 0
    for p in primes:
        s = SatakeLocal.from_lambda(p, float(table.lambdas[p]))
        for r in range(1, max_r + 1):
            terms = []
            for m, e in decomposition_exponents(r):
                if p**m <= table.limit:
                    terms.append(e * float(table.lambdas[p**m]))
                    from_table += 1
                else:
                    terms.append(e * sym_lambda_p(m, s))
            direct = s.lambda_p**r
            worst = max(worst, abs(math.fsum(terms) - direct) / max(1.0, abs(direct)))
    return SuiteResult("fcrel", worst < tol, {
        "max_prime": max_prime,
        "max_r": max_r,
        "primes": len(primes),
        "table_terms": from_table,
        "max_error": worst,
    })


def repidentity_suite(spec: PolynomialSpec, limit: int, tables: MultiplicativeTables,
                      threads: int = 1) -> SuiteResult:
    report = verify_rep_identity(rep_counts(spec, limit - 1, threads=threads), tables)
    return SuiteResult("repidentity", report.ok, {
        "poly": spec.kind,
        "limit": limit,
        "c": str(report.c) if report.c is not None else None,
        "inconsistencies": report.inconsistencies,
        "first_failure": list(report.first_failure) if report.first_failure else None,
    })
