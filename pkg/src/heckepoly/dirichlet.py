"""Local factors and Euler products for the L-functions attached to f and chi8.

Local factors are truncated power series in x = p^{-s}.  A factor evaluated
at s - 1 is the same series in p * x.  The square-free moment series

    R_r(s) = sum_{n square-free} lambda(n)^r sigma(n) n^{-s}

has local factor 1 + lambda(p)^r sigma(p) x, and splits as L_r(s) U_r(s) with

    L_r(s) = prod_n L(s-1, sym^{r-2n} f)^{e_n} L(s, sym^{r-2n} f x chi8)^{e_n},
    e_n = C(r, n) - C(r, n-1).

Writing 1/L_r = sum_k A_k x^k, the correction factor has coefficients
B_0 = 1, B_1 = 0 and B_k = A_k + A_{k-1} lambda(p)^r sigma(p) for k >= 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from heckepoly.arith import chi8, chi8_array, prime_sieve
from heckepoly.eigenform import EigenformTable
from heckepoly.errors import InvalidArgument
from heckepoly.sympow import decomposition_exponents, sym_power_coefficients

WORKING_DEGREE = 4

# Rosser-Schoenfeld: pi(x) < 1.25506 x / log x for x > 1
_PI_UPPER = 1.25506


class QuadraticElement:
    """Exact element a + b*lam of Q(lam) with lam^2 = t rational.

    Used for lambda(p) = a(p) / p^((k-1)/2), whose square is rational.
    """

    __slots__ = ("a", "b", "t")

    def __init__(self, a, b, t):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.t = Fraction(t)

    def _coerce(self, other):
        if isinstance(other, QuadraticElement):
            if other.t != self.t:
                raise ValueError("elements of different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticElement(other, 0, self.t)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticElement(self.a + o.a, self.b + o.b, self.t)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticElement(-self.a, -self.b, self.t)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticElement(self.a - o.a, self.b - o.b, self.t)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadraticElement(
            self.a * o.a + self.b * o.b * self.t, self.a * o.b + self.b * o.a, self.t
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadraticElement(self.a / other, self.b / other, self.t)
        return NotImplemented

    def __pow__(self, e: int):
        out = QuadraticElement(1, 0, self.t)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    __hash__ = None

    def __float__(self):
        root = math.sqrt(self.t) if self.t >= 0 else math.nan
        return float(self.a) + float(self.b) * root

    def __abs__(self):
        return abs(float(self))

    def __repr__(self):
        return f"QuadraticElement({self.a} + {self.b}*sqrt({self.t}))"


def exact_lambda(table: EigenformTable, p: int) -> QuadraticElement:
    """lambda(p) as sqrt(a(p)^2 / p^(k-1)) with the sign of a(p), exactly."""
    a = table.a[p]
    t = Fraction(a * a, p ** (table.weight - 1))
    sign = 1 if a >= 0 else -1
    return QuadraticElement(0, sign, t)


@dataclass
class LocalFactor:
    """Truncated series sum_k coeffs[k] x^k at a prime, with coeffs[0] = 1."""

    p: int
    coeffs: list

    def __post_init__(self):
        if self.coeffs[0] != 1:
            raise ValueError(f"local factor must have constant term 1, got {self.coeffs[0]!r}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def one(cls, p: int, degree: int, unit=1) -> "LocalFactor":
        return cls(p, [unit] + [0 * unit] * degree)

    def __mul__(self, other: "LocalFactor") -> "LocalFactor":
        d = min(self.degree, other.degree)
        out = []
        for k in range(d + 1):
            acc = self.coeffs[0] * other.coeffs[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return LocalFactor(self.p, out)

    def __pow__(self, e: int) -> "LocalFactor":
        if e < 0:
            return self.reciprocal() ** (-e)
        out = LocalFactor.one(self.p, self.degree, self.coeffs[0])
        for _ in range(e):
            out = out * self
        return out

    def reciprocal(self) -> "LocalFactor":
        """Truncated series inverse; exact for exact coefficient rings."""
        c = self.coeffs
        inv = [c[0]]
        for k in range(1, self.degree + 1):
            acc = c[1] * inv[k - 1]
            for i in range(2, k + 1):
                acc = acc + c[i] * inv[k - i]
            inv.append(-acc)
        return LocalFactor(self.p, inv)

    def scale(self, factor) -> "LocalFactor":
        """Substitute x -> factor * x."""
        out, w = [], 1
        for c in self.coeffs:
            out.append(c * w)
            w = w * factor
        out[0] = self.coeffs[0]
        return LocalFactor(self.p, out)

    def evaluate(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def sym_factor(m: int, p: int, lam, degree: int) -> LocalFactor:
    """Local factor of L(s, sym^m f) at p from lambda(p)."""
    return LocalFactor(p, sym_power_coefficients(m, lam, degree))


def local_L_r(r: int, p: int, lam, degree: int = WORKING_DEGREE) -> LocalFactor:
    """Local factor of L_r at p: sym-power factors at s-1 and chi8-twisted ones at s."""
    if r < 1 or degree < 1:
        raise InvalidArgument(f"need r >= 1 and degree >= 1, got r={r}, degree={degree}")
    chi = chi8(p)
    out = LocalFactor.one(p, degree, 1 + 0 * lam)
    for m, e in decomposition_exponents(r):
        base = sym_factor(m, p, lam, degree)
        untwisted = base.scale(p)
        out = out * untwisted**e
        if chi:
            out = out * base.scale(chi) ** e
    return out


def local_R_r(r: int, p: int, lam, degree: int = WORKING_DEGREE) -> LocalFactor:
    """Square-free local factor 1 + lambda(p)^r sigma(p) x."""
    first = lam**r * (p + chi8(p))
    one = 1 + 0 * lam
    return LocalFactor(p, [one, first] + [0 * one] * (degree - 1))


def local_U_r(r: int, p: int, lam, degree: int = WORKING_DEGREE) -> LocalFactor:
    """Correction factor U_r at p via B_k = A_k + A_{k-1} lambda(p)^r sigma(p), B_1 = 0."""
    if degree < 1:
        raise InvalidArgument(f"degree must be >= 1, got {degree}")
    A = local_L_r(r, p, lam, degree).reciprocal().coeffs
    c = lam**r * (p + chi8(p))
    B = [A[0], 0 * A[0]]
    for k in range(2, degree + 1):
        B.append(A[k] + A[k - 1] * c)
    return LocalFactor(p, B)


def identity_residual(r: int, p: int, lam, degree: int = WORKING_DEGREE) -> list:
    """Coefficientwise (L_r * U_r - R_r) at p."""
    prod = local_L_r(r, p, lam, degree) * local_U_r(r, p, lam, degree)
    rr = local_R_r(r, p, lam, degree)
    return [a - b for a, b in zip(prod.coeffs, rr.coeffs)]


def identity_scale(r: int, p: int, degree: int = WORKING_DEGREE) -> list[float]:
    """Majorant of every operand behind the k-th coefficient of L_r * U_r at p.

    Symmetric-power coefficients are complete homogeneous sums of unit-modulus
    roots, so they are dominated by their values at lambda = 2; for F = 1 + G the
    reciprocal is dominated by 1 / (1 - |G|).  Float rounding in the identity is
    a small multiple of machine epsilon times this scale.
    """
    hat = LocalFactor.one(p, degree, 1.0)
    for m, e in decomposition_exponents(r):
        base = sym_factor(m, p, 2.0, degree)
        hat = hat * base.scale(p) ** e
        if chi8(p):
            hat = hat * base**e
    L = hat.coeffs
    A = LocalFactor(p, [1.0] + [-c for c in L[1:]]).reciprocal().coeffs
    c = 2.0**r * (p + 1)
    U = [1.0] + [A[k] + A[k - 1] * c for k in range(1, degree + 1)]
    return [math.fsum(L[i] * U[k - i] for i in range(k + 1)) for k in range(degree + 1)]


# -- Euler products at real s ----------------------------------------------------------

KINDS = ("zeta", "L_chi8", "hecke", "hecke_twisted", "sym2", "sym2_twisted", "U_r")
# kind -> (symmetric power, twisted by chi8); zeta and L_chi8 are sym^0
_SYM_KINDS = {
    "zeta": (0, False),
    "L_chi8": (0, True),
    "hecke": (1, False),
    "hecke_twisted": (1, True),
    "sym2": (2, False),
    "sym2_twisted": (2, True),
}


@dataclass
class EulerValue:
    """Partial Euler product over p <= prime_bound with a bound on log of the omitted tail.

    ``heuristic`` marks a tail estimate that is not a proven bound.
    """

    kind: str
    s: float
    prime_bound: int
    value: float
    tail_bound: float
    weight: int | None = None
    heuristic: bool = False
    factors: dict = field(default_factory=dict)

    def interval(self) -> tuple[float, float]:
        lo = self.value * math.exp(-self.tail_bound)
        hi = self.value * math.exp(self.tail_bound)
        return (min(lo, hi), max(lo, hi))

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "s": self.s,
            "prime_bound": self.prime_bound,
            "value": self.value,
            "tail_bound": self.tail_bound,
            "eigenform_weight": self.weight,
        }
        if self.heuristic:
            out["tail_heuristic"] = True
        if self.factors:
            out["factors"] = {k: v.to_dict() for k, v in self.factors.items()}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def prime_power_sum_bound(sigma: float, P: int) -> float:
    """Upper bound for sum_{p > P} p^{-sigma}, sigma > 1, P >= 2."""
    integral = P ** (1 - sigma) / (sigma - 1)
    via_pi = _PI_UPPER * sigma * integral / math.log(P)
    return min(integral, via_pi)


def _sym_log(m: int, theta: np.ndarray, y: np.ndarray) -> np.ndarray:
    """log prod_j (1 - e^{i(m-2j) theta} y)^{-1} for real y, elementwise."""
    out = np.zeros_like(y, dtype=np.float64)
    for j in range(m + 1):
        c = np.cos((m - 2 * j) * theta)
        out -= 0.5 * np.log1p(y * y - 2 * y * c)
    return out


def _satake_angles(eigenform: EigenformTable, primes: np.ndarray) -> np.ndarray:
    lam = eigenform.lambdas[primes]
    return np.arccos(np.clip(lam / 2, -1.0, 1.0))


def _log_terms(kind: str, s: float, primes: np.ndarray, eigenform, r: int | None):
    x = primes.astype(np.float64) ** (-s)
    if kind in _SYM_KINDS:
        m, twisted = _SYM_KINDS[kind]
        theta = np.zeros_like(x) if m == 0 else _satake_angles(eigenform, primes)
        y = x * chi8_array(primes) if twisted else x
        return _sym_log(m, theta, y), np.ones_like(x)
    # U_r = R_r / L_r, each log computed exactly per prime
    theta = _satake_angles(eigenform, primes)
    lam = eigenform.lambdas[primes]
    chi = chi8_array(primes).astype(np.float64)
    first = 1 + lam**r * (primes + chi) * x
    logs = np.log(np.abs(first))
    for m, e in decomposition_exponents(r):
        logs -= e * (_sym_log(m, theta, primes * x) + _sym_log(m, theta, chi * x))
    return logs, np.sign(first)


def _tail_bound(kind: str, s: float, P: int, r: int | None) -> float:
    if kind in _SYM_KINDS:
        m, _ = _SYM_KINDS[kind]
        return (m + 1) / (1 - P ** (-s)) * prime_power_sum_bound(s, P)
    # |log U_p| <= sum_{j>=2} ((b x)^j + 2^r (p x)^j + 2^r x^j) / j, b = 2^r (p + 1)
    y1 = 2**r * (1 + 1 / P) * P ** (1 - s)
    y2 = P ** (1 - s)
    y3 = P ** (-s)
    if y1 >= 1:
        return math.inf
    quad = (4**r * (1 + 1 / P) ** 2 / (2 * (1 - y1)) + 2**r / (2 * (1 - y2))) * prime_power_sum_bound(2 * s - 2, P)
    return quad + 2**r / (2 * (1 - y3)) * prime_power_sum_bound(2 * s, P)


def _edge_allowed(kind: str) -> bool:
    return kind in ("L_chi8", "hecke", "hecke_twisted", "sym2", "sym2_twisted")


def euler_value(kind: str, s: float, prime_bound: int, eigenform: EigenformTable | None = None,
                r: int | None = None, allow_edge: bool = False) -> EulerValue:
    """Partial Euler product prod_{p <= prime_bound} F_p(p^{-s}) for one L-function kind.

    Products are accumulated as correctly rounded sums of logarithms, so the
    result does not depend on evaluation order.  At the edge s = 1 (only with
    ``allow_edge``, and only for kinds without a pole there) the product
    converges conditionally and the tail estimate is heuristic: the size of
    the last dyadic block of log-contributions plus the second-order tail.
    """
    if kind not in KINDS:
        raise InvalidArgument(f"unknown kind {kind!r}; choose from {KINDS}")
    if prime_bound < 2:
        raise InvalidArgument(f"prime_bound must be >= 2, got {prime_bound}")
    edge = False
    threshold = 1.5 if kind == "U_r" else 1.0
    if s <= threshold:
        if allow_edge and s == 1.0 and _edge_allowed(kind):
            edge = True
        else:
            raise InvalidArgument(f"s = {s} outside the absolute-convergence region of {kind} (s > {threshold})")
    needs_form = kind not in ("zeta", "L_chi8")
    if needs_form:
        if eigenform is None:
            raise InvalidArgument(f"{kind} needs an eigenform table")
        if eigenform.limit < prime_bound:
            raise InvalidArgument(f"eigenform table limit {eigenform.limit} < prime_bound {prime_bound}")
    if kind == "U_r" and (r is None or r < 1):
        raise InvalidArgument("U_r needs r >= 1")

    primes = prime_sieve(prime_bound)
    logs, signs = _log_terms(kind, s, primes, eigenform, r)
    log_value = math.fsum(logs.tolist())
    value = math.exp(log_value) * float(np.prod(signs))
    if edge:
        block = primes > prime_bound // 2
        m, _ = _SYM_KINDS[kind]
        tail = abs(math.fsum(logs[block].tolist())) + (m + 1) * prime_power_sum_bound(2.0, prime_bound)
    else:
        tail = _tail_bound(kind, s, prime_bound, r)
    return EulerValue(
        kind=kind if kind != "U_r" else f"U_{r}",
        s=s,
        prime_bound=prime_bound,
        value=value,
        tail_bound=tail,
        weight=eigenform.weight if needs_form else None,
        heuristic=edge,
    )


def combine(kind: str, factors: dict[str, EulerValue], s: float = math.nan) -> EulerValue:
    """Product of Euler values; log tail bounds add."""
    value = math.prod(f.value for f in factors.values())
    return EulerValue(
        kind=kind,
        s=s,
        prime_bound=min((f.prime_bound for f in factors.values()), default=0),
        value=value,
        tail_bound=math.fsum(f.tail_bound for f in factors.values()),
        weight=next((f.weight for f in factors.values() if f.weight is not None), None),
        heuristic=any(f.heuristic for f in factors.values()),
        factors=dict(factors),
    )


def constant_C(eigenform: EigenformTable, prime_bound: int, edge_prime_bound: int | None = None) -> EulerValue:
    """L(2, chi8) L(1, sym^2 f) L(2, sym^2 f x chi8) U_2(2).

    L(1, sym^2 f) is evaluated at the edge of convergence with ``edge_prime_bound``
    primes (default: the whole table) and carries a heuristic tail.
    """
    if prime_bound < 100:
        raise InvalidArgument(f"prime_bound must be >= 100, got {prime_bound}")
    edge = eigenform.limit if edge_prime_bound is None else edge_prime_bound
    factors = {
        "L(2,chi8)": euler_value("L_chi8", 2.0, prime_bound),
        "L(1,sym2 f)": euler_value("sym2", 1.0, edge, eigenform, allow_edge=True),
        "L(2,sym2 f x chi8)": euler_value("sym2_twisted", 2.0, prime_bound, eigenform),
        "U_2(2)": euler_value("U_r", 2.0, prime_bound, eigenform, r=2),
    }
    return combine("C", factors, s=2.0)
