"""Exact Fourier coefficients of level-1 Hecke eigenforms.

Delta = q * prod (1 - q^n)^24 is obtained from Jacobi's sparse expansion of
prod (1 - q^n)^3 by three squarings.  The remaining one-dimensional cusp
spaces are spanned by Delta * E4^i * E6^j.

Series products use Kronecker substitution: a truncated series with
coefficients reduced mod 2^B is packed into a single big integer (one slot of
fixed bit width per coefficient) and multiplied with GMP.  Reduction mod 2^B
is a ring map, and Deligne's bound |a(n)| <= d(n) n^((k-1)/2) fixes B so the
signed residue is the true coefficient.
"""

from __future__ import annotations

import logging
import math
import struct
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import gmpy2
import numpy as np

from heckepoly.arith import sigma_k, smallest_prime_factor
from heckepoly.errors import InvalidArgument, check_budget

log = logging.getLogger(__name__)

SUPPORTED_WEIGHTS = (12, 16, 18, 20, 22, 26)
# weight -> (power of E4, power of E6) multiplying Delta
_EISENSTEIN_POWERS = {12: (0, 0), 16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}

_CACHE_MAGIC = b"HPEIGEN\0"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class EigenformTable:
    """Coefficients a(n) (exact) and lambda(n) = a(n) / n^((k-1)/2), n = 1..limit.

    ``a[0]`` and ``lambdas[0]`` are zero placeholders.
    """

    weight: int
    limit: int
    a: tuple
    lambdas: np.ndarray

    def __post_init__(self):
        self.lambdas.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, EigenformTable):
            return NotImplemented
        return (self.weight, self.limit, self.a) == (other.weight, other.limit, other.a)

    __hash__ = None

    @property
    def half_weight(self) -> float:
        return (self.weight - 1) / 2


def _make_table(weight: int, coeffs: list[int]) -> EigenformTable:
    limit = len(coeffs) - 1
    k = (weight - 1) / 2
    lam = np.zeros(limit + 1, dtype=np.float64)
    if limit >= 1:
        n = np.arange(1, limit + 1, dtype=np.float64)
        lam[1:] = np.array([float(c) for c in coeffs[1:]]) / n**k
    return EigenformTable(weight=weight, limit=limit, a=tuple(coeffs), lambdas=lam)


# -- Kronecker-substitution series arithmetic mod 2^B -------------------------------


class _ModSeries:
    """Truncated power series with coefficients mod 2^bits, stored as limb bytes."""

    def __init__(self, raw: np.ndarray, bits: int):
        # raw: (length, bits // 8) little-endian uint8
        self.raw = raw
        self.bits = bits

    @property
    def length(self) -> int:
        return self.raw.shape[0]

    @classmethod
    def from_ints(cls, values, bits: int) -> "_ModSeries":
        width = bits // 8
        mask = (1 << bits) - 1
        buf = b"".join((int(v) & mask).to_bytes(width, "little") for v in values)
        raw = np.frombuffer(buf, dtype=np.uint8).reshape(-1, width).copy()
        return cls(raw, bits)

    def _slot_bytes(self, other_len: int) -> int:
        bits = 2 * self.bits + max(self.length, other_len).bit_length() + 1
        return -(-bits // 64) * 8

    def _pack(self, slot: int) -> gmpy2.mpz:
        buf = np.zeros((self.length, slot), dtype=np.uint8)
        buf[:, : self.raw.shape[1]] = self.raw
        return gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))

    def mul(self, other: "_ModSeries", length: int) -> "_ModSeries":
        slot = self._slot_bytes(other.length)
        if other is self:
            z = self._pack(slot) ** 2
        else:
            z = self._pack(slot) * other._pack(slot)
        need = length * slot
        data = gmpy2.to_binary(z)[2:need + 2].ljust(need, b"\0")
        prod = np.frombuffer(data, dtype=np.uint8).reshape(length, slot)
        return _ModSeries(np.ascontiguousarray(prod[:, : self.bits // 8]), self.bits)

    def signed_ints(self) -> list[int]:
        width = self.bits // 8
        data = self.raw.tobytes()
        return [int.from_bytes(data[i : i + width], "little", signed=True)
                for i in range(0, len(data), width)]


def _coefficient_bits(weight: int, limit: int) -> int:
    if limit < 1:
        raise InvalidArgument(f"limit must be >= 1, got {limit}")
    # |a(n)| <= d(n) n^((k-1)/2) with d(n) <= 2 sqrt(n); one sign bit plus a guard bit
    need = 2 + math.log2(2 * math.sqrt(limit)) + (weight - 1) / 2 * math.log2(max(limit, 2))
    return max(64, -(-int(math.ceil(need)) // 64) * 64)


def eta3_series(limit: int) -> list[tuple[int, int]]:
    """Nonzero coefficients of prod_{n>=1} (1 - q^n)^3 up to q^limit.

    Jacobi: the product equals sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}; returned as
    (exponent, value) pairs in increasing exponent order.
    """
    if limit < 0:
        raise InvalidArgument(f"limit must be >= 0, got {limit}")
    out = []
    k = 0
    while k * (k + 1) // 2 <= limit:
        out.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    return out


def _eta24(length: int, bits: int, order: str) -> _ModSeries:
    """prod (1 - q^n)^24 mod q^length."""
    dense = [0] * length
    for e, v in eta3_series(length - 1):
        dense[e] = v
    eta3 = _ModSeries.from_ints(dense, bits)
    if order == "squaring":
        s = eta3
        for _ in range(3):
            s = s.mul(s, length)
        return s
    if order == "sequential":
        s = eta3
        for _ in range(7):
            s = s.mul(eta3, length)
        return s
    raise InvalidArgument(f"unknown multiplication order {order!r}")


def _check_limit(limit: int, bits: int, budget: int | None):
    if limit < 1:
        raise InvalidArgument(f"limit must be >= 1, got {limit}")
    # packed operands and product: a few slots of ~2B+log bits per coefficient
    check_budget(limit * (bits // 2 + 64) + limit * 120, f"eigenform coefficients to {limit}", budget)


def delta_coefficients(limit: int, order: str = "squaring", budget: int | None = None) -> EigenformTable:
    """Ramanujan tau(n) for n = 1..limit as a weight-12 table."""
    bits = _coefficient_bits(12, limit)
    _check_limit(limit, bits, budget)
    eta24 = _eta24(limit, bits, order)
    return _make_table(12, [0] + eta24.signed_ints())


def _eisenstein(weight: int, limit: int, bits: int, spf) -> _ModSeries:
    const = {4: 240, 6: -504}[weight]
    sig = sigma_k(limit, weight - 1, spf)
    return _ModSeries.from_ints([1] + [const * s for s in sig[1:]], bits)


def eigenform_coefficients(weight: int, limit: int, order: str = "squaring",
                           budget: int | None = None) -> EigenformTable:
    """Normalized eigenform of the given weight (one-dimensional cusp space only)."""
    if weight not in SUPPORTED_WEIGHTS:
        raise InvalidArgument(
            f"weight {weight} unsupported; cusp space must be one-dimensional: {SUPPORTED_WEIGHTS}"
        )
    if weight == 12:
        return delta_coefficients(limit, order, budget)
    bits = _coefficient_bits(weight, limit)
    _check_limit(limit, bits, budget)
    # Delta as a series in q: index n holds tau(n), index 0 is 0
    f = _ModSeries(np.zeros((1, bits // 8), dtype=np.uint8), bits)
    eta24 = _eta24(limit, bits, order)
    f = _ModSeries(np.concatenate([f.raw, eta24.raw]), bits)
    i4, i6 = _EISENSTEIN_POWERS[weight]
    spf = smallest_prime_factor(limit)
    if i4:
        e4 = _eisenstein(4, limit, bits, spf)
        for _ in range(i4):
            f = f.mul(e4, limit + 1)
    if i6:
        f = f.mul(_eisenstein(6, limit, bits, spf), limit + 1)
    coeffs = f.signed_ints()
    coeffs[0] = 0
    return _make_table(weight, coeffs)


def verify_hecke(table: EigenformTable, m: int, n: int) -> bool:
    """Exact Hecke relation a(m) a(n) = sum_{d | (m,n)} d^(k-1) a(mn/d^2)."""
    if m < 1 or n < 1 or m * n > table.limit:
        raise InvalidArgument(f"need 1 <= m, n and m*n <= {table.limit}, got ({m}, {n})")
    a = table.a
    g = gcd(m, n)
    rhs = sum(d ** (table.weight - 1) * a[m * n // (d * d)] for d in range(1, g + 1) if g % d == 0)
    return a[m] * a[n] == rhs


def verify_hecke_range(table: EigenformTable, max_product: int) -> list[tuple[int, int]]:
    """All pairs (m, n), m <= n, m*n <= max_product that violate the Hecke relation."""
    failures = []
    for m in range(1, math.isqrt(max_product) + 1):
        for n in range(m, max_product // m + 1):
            if not verify_hecke(table, m, n):
                failures.append((m, n))
    return failures


def verify_deligne(table: EigenformTable, limit: int, divcount: np.ndarray) -> int | None:
    """First n <= limit with |lambda(n)| > d(n) (1 + 1e-9), or None."""
    if limit > table.limit or limit >= len(divcount):
        raise InvalidArgument(f"limit {limit} exceeds table size")
    lam = np.abs(table.lambdas[1 : limit + 1])
    bad = np.flatnonzero(lam > divcount[1 : limit + 1] * (1 + 1e-9))
    return int(bad[0]) + 1 if bad.size else None


# -- cache and export ------------------------------------------------------------------


def save_table(table: EigenformTable, path: str | Path) -> None:
    """Binary cache: header (magic, version, weight, limit, width encoding), then
    length-prefixed signed little-endian integers a(1..limit)."""
    chunks = [_CACHE_MAGIC, struct.pack("<IIQI", _CACHE_VERSION, table.weight, table.limit, 2)]
    for v in table.a[1:]:
        b = v.to_bytes((v.bit_length() + 8) // 8 or 1, "little", signed=True)
        chunks.append(struct.pack("<H", len(b)))
        chunks.append(b)
    Path(path).write_bytes(b"".join(chunks))


def load_table(path: str | Path, weight: int | None = None, limit: int | None = None) -> EigenformTable:
    data = Path(path).read_bytes()
    if data[:8] != _CACHE_MAGIC:
        raise ValueError(f"{path}: not a coefficient cache")
    version, w, lim, prefix = struct.unpack_from("<IIQI", data, 8)
    if version != _CACHE_VERSION or prefix != 2:
        raise ValueError(f"{path}: format version {version}, expected {_CACHE_VERSION}")
    if (weight is not None and w != weight) or (limit is not None and lim != limit):
        raise ValueError(f"{path}: holds weight {w} limit {lim}")
    pos = 8 + struct.calcsize("<IIQI")
    coeffs = [0]
    for _ in range(lim):
        (size,) = struct.unpack_from("<H", data, pos)
        pos += 2
        coeffs.append(int.from_bytes(data[pos : pos + size], "little", signed=True))
        pos += size
    return _make_table(w, coeffs)


def export_csv(table: EigenformTable, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("n,a,lambda\n")
        for n in range(1, table.limit + 1):
            fh.write(f"{n},{table.a[n]},{float(table.lambdas[n])!r}\n")
