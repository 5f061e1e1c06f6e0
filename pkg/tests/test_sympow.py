import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heckepoly.sympow import (
    SatakeLocal,
    chebyshev_A,
    chebyshev_u_recurrence,
    decomposition_exponents,
    power_decomposition,
    sym_lambda_p,
    sym_local_factor,
    sym_power_coefficients,
)

LAM2 = -24 / 2**5.5
lambdas = st.floats(-2.0, 2.0, allow_nan=False)


def test_satake_pair():
    s = SatakeLocal.from_lambda(2, LAM2)
    assert abs(s.alpha * s.beta - 1) < 1e-15
    assert abs((s.alpha + s.beta).real - LAM2) < 1e-15
    assert 0 <= s.theta <= math.pi


def test_satake_clamps_rounding_overshoot():
    assert SatakeLocal.from_lambda(2, 2.0 + 1e-15).theta == 0.0


def test_sym_lambda_examples(delta_small):
    s = SatakeLocal.from_lambda(2, LAM2)
    assert sym_lambda_p(0, s) == 1
    assert sym_lambda_p(1, s) == LAM2
    assert sym_lambda_p(2, s) == pytest.approx(576 / 2048 - 1, abs=1e-15)
    assert sym_lambda_p(2, s) == pytest.approx(delta_small.lambdas[4], abs=1e-14)
    with pytest.raises(ValueError):
        sym_lambda_p(-1, s)


@given(lambdas, st.integers(0, 40))
def test_sym_lambda_bounded(lam, m):
    assert abs(sym_lambda_p(m, SatakeLocal.from_lambda(2, lam))) <= m + 1 + 1e-9


@given(st.floats(0.01, math.pi - 0.01), st.integers(0, 30))
def test_recurrence_matches_closed_form(theta, m):
    closed = math.sin((m + 1) * theta) / math.sin(theta)
    assert chebyshev_u_recurrence(m, 2 * math.cos(theta)) == pytest.approx(closed, abs=1e-9)


def test_prime_power_eigenvalues_from_table(delta_small, tables_small):
    for p in (2, 3, 5, 7):
        s = SatakeLocal.from_lambda(p, float(delta_small.lambdas[p]))
        m = 1
        while p**m <= delta_small.limit:
            assert sym_lambda_p(m, s) == pytest.approx(delta_small.lambdas[p**m], abs=1e-9)
            m += 1


def test_local_factor_examples():
    s = SatakeLocal.from_lambda(2, LAM2)
    assert sym_local_factor(0, s, 6) == [1.0] * 7
    c = sym_local_factor(1, s, 2)
    assert c[0] == 1.0
    assert c[2] == pytest.approx(LAM2**2 - 1, abs=1e-14)


def test_local_factor_m1_against_table(delta_small):
    s = SatakeLocal.from_lambda(2, float(delta_small.lambdas[2]))
    c = sym_local_factor(1, s, 4)
    for k in range(5):
        assert c[k] == pytest.approx(delta_small.lambdas[2**k], abs=1e-9)


def brute_local_factor(m, theta, degree):
    # complete homogeneous sums over the m+1 roots, by explicit enumeration
    roots = [cmath.exp(1j * (m - 2 * j) * theta) for j in range(m + 1)]
    out = []
    for k in range(degree + 1):
        total = 0
        stack = [(0, k, 1)]
        while stack:
            i, left, prod = stack.pop()
            if i == len(roots):
                if left == 0:
                    total += prod
                continue
            for e in range(left + 1):
                stack.append((i + 1, left - e, prod * roots[i] ** e))
        out.append(total.real)
    return out


@pytest.mark.parametrize("m", range(0, 6))
def test_local_factor_paths_agree(m):
    for lam in (-1.9, -0.53, 0.0, 0.7, 1.99):
        s = SatakeLocal.from_lambda(3, lam)
        complex_path = sym_local_factor(m, s, 4)
        newton = sym_power_coefficients(m, lam, 4)
        oracle = brute_local_factor(m, s.theta, 4)
        assert complex_path[1] == pytest.approx(sym_lambda_p(m, s), abs=1e-12)
        assert np.allclose(complex_path, newton, atol=1e-10)
        assert np.allclose(complex_path, oracle, atol=1e-10)


def test_chebyshev_A_examples():
    assert chebyshev_A(2, 0) == 1
    assert chebyshev_A(2, 2) == 1
    assert chebyshev_A(3, 1) == 2
    assert chebyshev_A(3, 2) == 0
    with pytest.raises(ValueError):
        chebyshev_A(2, 3)


@pytest.mark.parametrize("ell", range(13))
def test_chebyshev_identity(ell):
    xs = np.random.default_rng(ell).uniform(-2, 2, 200)
    rebuilt = sum(chebyshev_A(ell, j) * chebyshev_u_recurrence(j, xs) for j in range(ell + 1))
    assert np.allclose(rebuilt, xs**ell, rtol=1e-8, atol=1e-8)
    assert 2**ell == sum(chebyshev_A(ell, j) * (j + 1) for j in range(ell + 1))


def test_chebyshev_reversed_pairing_fails():
    # pairing A_{ell,j} with U_{ell-j} instead of U_j breaks at ell = 3
    x = 1.3
    reversed_pairing = sum(chebyshev_A(3, j) * chebyshev_u_recurrence(3 - j, x) for j in range(4))
    assert abs(reversed_pairing - x**3) > 0.1
    assert sum(chebyshev_A(3, j) * (3 - j + 1) for j in range(4)) != 2**3


def test_decomposition_exponents():
    assert decomposition_exponents(1) == [(1, 1)]
    assert decomposition_exponents(2) == [(2, 1), (0, 1)]
    assert decomposition_exponents(4) == [(4, 1), (2, 3), (0, 2)]


def test_power_decomposition_examples():
    s = SatakeLocal.from_lambda(2, LAM2)
    assert power_decomposition(1, s) == LAM2
    assert power_decomposition(2, s) == pytest.approx(sym_lambda_p(2, s) + 1, abs=1e-15)
    assert power_decomposition(5, s) == pytest.approx(LAM2**5, rel=1e-8)
    with pytest.raises(ValueError):
        power_decomposition(0, s)


@given(lambdas, st.integers(1, 12))
def test_power_decomposition_property(lam, r):
    s = SatakeLocal.from_lambda(5, lam)
    assert abs(power_decomposition(r, s) - lam**r) <= 1e-8 * max(1.0, abs(lam) ** r)
