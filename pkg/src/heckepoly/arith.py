"""Sieved elementary arithmetic functions.

All arrays have length ``limit + 1`` so that entry ``n`` holds the value at
``n``; entry 0 is a zero placeholder.  The twisted divisor sum stored in
``sigma`` is

    sigma(n) = sum_{d | n} chi8(d) * (n / d)

where chi8 is the real character mod 8 given by the Jacobi symbol (8/n).
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from heckepoly.errors import InvalidArgument, check_budget

# chi8 by residue mod 8.
_CHI8_PATTERN = np.array([0, 1, 0, -1, 0, -1, 0, 1], dtype=np.int8)

_TABLES_MAGIC = b"HPTABLES"
_TABLES_VERSION = 1
# bytes per index across all stored arrays (int8, int64, bool, int32) plus sieve scratch
_BYTES_PER_ENTRY = 1 + 8 + 1 + 4 + 16


def chi8(n: int) -> int:
    """Jacobi symbol (8/n) for a positive integer n."""
    if n < 1:
        raise InvalidArgument(f"chi8 needs n >= 1, got {n}")
    return int(_CHI8_PATTERN[n % 8])


def chi8_array(n: np.ndarray) -> np.ndarray:
    return _CHI8_PATTERN[np.asarray(n) % 8]


def prime_sieve(limit: int) -> np.ndarray:
    """Ascending array of primes <= limit (Eratosthenes)."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, int(limit**0.5) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def smallest_prime_factor(limit: int) -> np.ndarray:
    """spf[n] = least prime dividing n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in prime_sieve(int(limit**0.5)):
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


@dataclass(frozen=True)
class MultiplicativeTables:
    """Immutable sieved tables of chi8, sigma, the square-free indicator and d(n)."""

    limit: int
    chi8: np.ndarray
    sigma: np.ndarray
    squarefree: np.ndarray
    divcount: np.ndarray
    primes: np.ndarray

    def __post_init__(self):
        for arr in (self.chi8, self.sigma, self.squarefree, self.divcount, self.primes):
            arr.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, MultiplicativeTables):
            return NotImplemented
        return self.limit == other.limit and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("chi8", "sigma", "squarefree", "divcount", "primes")
        )

    __hash__ = None

    def squarefree_count(self, x: int) -> int:
        return int(np.count_nonzero(self.squarefree[1 : x + 1]))


def build_tables(limit: int, budget: int | None = None) -> MultiplicativeTables:
    """Sieve chi8, sigma, the square-free indicator, d(n) and the primes up to ``limit``."""
    if limit < 1:
        raise InvalidArgument(f"limit must be >= 1, got {limit}")
    check_budget(_BYTES_PER_ENTRY * (limit + 1), f"arithmetic tables to {limit}", budget)

    n = np.arange(limit + 1, dtype=np.int64)
    chi = chi8_array(n)
    chi[0] = 0

    # Hyperbola split: every factorization n = a*b with a <= b is visited once from
    # the smaller factor a <= sqrt(limit).
    sigma = np.zeros(limit + 1, dtype=np.int64)
    divcount = np.zeros(limit + 1, dtype=np.int32)
    for a in range(1, int(limit**0.5) + 1):
        b = np.arange(a, limit // a + 1, dtype=np.int64)
        idx = a * b
        # (d, n/d) = (a, b) and, when a != b, also (b, a)
        contrib = int(chi[a]) * b + chi[b].astype(np.int64) * a
        contrib[0] = int(chi[a]) * a
        sigma[idx] += contrib
        divcount[idx] += 2
        divcount[a * a] -= 1

    squarefree = np.ones(limit + 1, dtype=bool)
    squarefree[0] = False
    primes = prime_sieve(limit)
    for p in primes[primes * primes <= limit]:
        squarefree[p * p :: p * p] = False

    return MultiplicativeTables(
        limit=limit,
        chi8=chi,
        sigma=sigma,
        squarefree=squarefree,
        divcount=divcount,
        primes=primes,
    )


def save_tables(tables: MultiplicativeTables, path: str | Path) -> None:
    """Binary cache: magic, format version, limit, then the raw arrays."""
    with open(path, "wb") as fh:
        fh.write(_TABLES_MAGIC)
        fh.write(struct.pack("<IQQ", _TABLES_VERSION, tables.limit, len(tables.primes)))
        fh.write(tables.chi8.astype("<i1").tobytes())
        fh.write(tables.sigma.astype("<i8").tobytes())
        fh.write(np.packbits(tables.squarefree, bitorder="little").tobytes())
        fh.write(tables.divcount.astype("<i4").tobytes())
        fh.write(tables.primes.astype("<i8").tobytes())


def load_tables(path: str | Path, limit: int | None = None) -> MultiplicativeTables:
    """Read a cache written by :func:`save_tables`.

    Raises ValueError on a bad magic string, a different format version or a
    limit other than the requested one.
    """
    data = Path(path).read_bytes()
    if data[:8] != _TABLES_MAGIC:
        raise ValueError(f"{path}: not a table cache")
    version, stored_limit, n_primes = struct.unpack_from("<IQQ", data, 8)
    if version != _TABLES_VERSION:
        raise ValueError(f"{path}: format version {version}, expected {_TABLES_VERSION}")
    if limit is not None and stored_limit != limit:
        raise ValueError(f"{path}: limit {stored_limit}, expected {limit}")
    size = stored_limit + 1
    pos = 8 + struct.calcsize("<IQQ")

    def take(dtype, count):
        nonlocal pos
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
        pos += arr.nbytes
        return arr

    chi = take("<i1", size).astype(np.int8)
    sigma = take("<i8", size).astype(np.int64)
    packed = take(np.uint8, (size + 7) // 8)
    squarefree = np.unpackbits(packed, count=size, bitorder="little").astype(bool)
    divcount = take("<i4", size).astype(np.int32)
    primes = take("<i8", n_primes).astype(np.int64)
    return MultiplicativeTables(stored_limit, chi, sigma, squarefree, divcount, primes)


def export_tables_csv(tables: MultiplicativeTables, path: str | Path, limit: int | None = None) -> None:
    limit = tables.limit if limit is None else min(limit, tables.limit)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "chi8", "sigma", "squarefree", "divcount"])
        for n in range(1, limit + 1):
            w.writerow([n, int(tables.chi8[n]), int(tables.sigma[n]),
                        int(tables.squarefree[n]), int(tables.divcount[n])])


def sigma_k(limit: int, k: int, spf: np.ndarray | None = None) -> list[int]:
    """Exact divisor power sums sigma_k(n), n = 0..limit, as Python integers.

    Built multiplicatively from the smallest-prime-factor table; entry 0 is 0.
    """
    if spf is None:
        spf = smallest_prime_factor(limit)
    out = [0] * (limit + 1)
    if limit >= 1:
        out[1] = 1
    # (prime power part, sigma_k of that part) of n, carried from n / p
    pp_of = [0] * (limit + 1)
    spp_of = [0] * (limit + 1)
    spf_list = spf.tolist()
    for n in range(2, limit + 1):
        p = spf_list[n]
        m = n // p
        if m % p == 0:
            pp = pp_of[m] * p
            spp = spp_of[m] + pp**k
        else:
            pp = p
            spp = 1 + p**k
        pp_of[n] = pp
        spp_of[n] = spp
        rest = n // pp
        out[n] = spp * out[rest]
    return out
