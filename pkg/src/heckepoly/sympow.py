"""Satake parameters and symmetric powers at a prime.

With lambda(p) = 2 cos(theta) the Satake pair is (e^{i theta}, e^{-i theta}),
and the m-th symmetric power has local roots e^{i (m - 2j) theta}, j = 0..m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np


@dataclass(frozen=True)
class SatakeLocal:
    p: int
    lambda_p: float
    theta: float

    @classmethod
    def from_lambda(cls, p: int, lambda_p: float) -> "SatakeLocal":
        # rounding can push |lambda| a hair past 2
        c = min(1.0, max(-1.0, lambda_p / 2))
        return cls(p=p, lambda_p=float(lambda_p), theta=math.acos(c))

    @property
    def alpha(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def beta(self) -> complex:
        return self.alpha.conjugate()


def chebyshev_u_recurrence(m: int, trace):
    """u_m for u_0 = 1, u_1 = trace, u_{i+1} = trace * u_i - u_{i-1}.

    With trace = 2 cos(theta) this is U_m(cos theta).  Works for floats, numpy
    arrays and any ring element supporting + - *.
    """
    prev, cur = 1, trace
    if m == 0:
        return prev + 0 * trace
    for _ in range(m - 1):
        prev, cur = cur, trace * cur - prev
    return cur


def sym_lambda_p(m: int, s: SatakeLocal) -> float:
    """Coefficient of p^{-s} in L(s, sym^m f), which equals lambda_f(p^m)."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return float(chebyshev_u_recurrence(m, s.lambda_p))


def sym_local_factor(m: int, s: SatakeLocal, degree: int) -> list[float]:
    """Coefficients c_0..c_degree of prod_{j=0}^m (1 - alpha^{m-j} beta^j x)^{-1}.

    Complex geometric series multiplied out, then projected to the real line.
    """
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    coeffs = np.zeros(degree + 1, dtype=complex)
    coeffs[0] = 1
    for j in range(m + 1):
        root = np.exp(1j * (m - 2 * j) * s.theta)
        geom = root ** np.arange(degree + 1)
        coeffs = np.convolve(coeffs, geom)[: degree + 1]
    if np.max(np.abs(coeffs.imag), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(coeffs.real))):
        raise ArithmeticError("symmetric power local factor has a non-real coefficient")
    return coeffs.real.tolist()


def sym_power_coefficients(m: int, lam, degree: int) -> list:
    """Same coefficients as :func:`sym_local_factor`, from lambda(p) alone.

    Newton's identities over the power sums P_k = sum_j alpha^{k(m-2j)}; each P_k
    is the U-recurrence evaluated at the trace alpha^k + beta^k.  Exact when
    ``lam`` is an exact ring element (see :class:`heckepoly.dirichlet.QuadraticElement`).
    """
    traces = [2 + 0 * lam, lam]
    for _ in range(2, degree + 1):
        traces.append(lam * traces[-1] - traces[-2])
    powers = [None] + [chebyshev_u_recurrence(m, traces[k]) for k in range(1, degree + 1)]
    h = [1 + 0 * lam]
    for k in range(1, degree + 1):
        acc = 0 * lam
        for i in range(1, k + 1):
            acc = acc + powers[i] * h[k - i]
        h.append(acc / k)
    return h


def chebyshev_A(ell: int, j: int) -> int:
    """A_{ell,j} = C(ell, (ell-j)/2) - C(ell, (ell-j)/2 - 1) when j = ell mod 2, else 0."""
    if not 0 <= j <= ell:
        raise ValueError(f"need 0 <= j <= ell, got ({ell}, {j})")
    if (ell - j) % 2:
        return 0
    h = (ell - j) // 2
    return comb(ell, h) - (comb(ell, h - 1) if h >= 1 else 0)


def decomposition_exponents(r: int) -> list[tuple[int, int]]:
    """Pairs (r - 2n, C(r,n) - C(r,n-1)) for n = 0..floor(r/2)."""
    return [(r - 2 * n, comb(r, n) - (comb(r, n - 1) if n >= 1 else 0)) for n in range(r // 2 + 1)]


def power_decomposition(r: int, s: SatakeLocal) -> float:
    """lambda(p)^r rebuilt as sum_n (C(r,n) - C(r,n-1)) lambda_{sym^{r-2n}}(p)."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    return math.fsum(e * sym_lambda_p(m, s) for m, e in decomposition_exponents(r))
