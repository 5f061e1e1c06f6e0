import math
from fractions import Fraction

import numpy as np
import pytest

from heckepoly.eigenform import delta_coefficients
from heckepoly.errors import InvalidArgument
from heckepoly.moments import (
    MomentSeries,
    checkpoint_schedule,
    compare_constant,
    fit_main_term,
    growth_exponent,
    log_polynomial_degree,
    moment_series_lattice,
    moment_series_sieve,
    moment_sum_lattice,
    moment_sum_sieve,
    predicted_exponents,
)


def synthetic(fn, xs, r=2):
    return MomentSeries(r=r, method="sieve", weight=12, checkpoints=[(int(x), float(fn(x))) for x in xs])


def test_checkpoint_schedule():
    xs = checkpoint_schedule()
    assert xs[0] == 1000 and xs[-1] == 10**6
    assert len(xs) == 25
    assert xs[1] == math.ceil(10**3.125)
    assert checkpoint_schedule(0, 1, 8)[0] == 1


def test_series_must_increase():
    with pytest.raises(InvalidArgument):
        MomentSeries(r=1, method="sieve", weight=12, checkpoints=[(10, 1.0), (10, 2.0)])


@pytest.mark.parametrize("r", [1, 2, 5])
def test_sum_at_one(r, tables_small, delta_small):
    assert moment_sum_sieve(r, 1, tables_small, delta_small) == 1.0


def test_sum_at_two(tables_small, delta_small):
    assert moment_sum_sieve(1, 2, tables_small, delta_small) == pytest.approx(1 - 48 / 2**5.5, abs=1e-14)
    assert moment_sum_sieve(1, 2, tables_small, delta_small) == pytest.approx(-0.06066, abs=1e-5)


def test_brute_force_loop(delta_small):
    tau = delta_small.a
    sigma = {1: 1, 2: 2, 3: 2, 5: 4, 6: 4, 7: 8, 10: 8}
    expected = math.fsum((tau[n] / n**5.5) ** 2 * s for n, s in sigma.items())
    from heckepoly.arith import build_tables

    assert moment_sum_sieve(2, 10, build_tables(10), delta_small) == pytest.approx(expected, rel=1e-15)


def test_sieve_range_checks(tables_small, delta_small):
    with pytest.raises(InvalidArgument):
        moment_sum_sieve(2, 0, tables_small, delta_small)
    with pytest.raises(InvalidArgument):
        moment_sum_sieve(2, 10**5, tables_small, delta_small)
    with pytest.raises(InvalidArgument):
        moment_sum_sieve(0, 10, tables_small, delta_small)


def test_series_matches_pointwise(tables_small, delta_small):
    xs = [1, 10, 100, 1000, 10_000]
    series = moment_series_sieve(3, xs, tables_small, delta_small, threads=3)
    for x, s in series.checkpoints:
        assert s == moment_sum_sieve(3, x, tables_small, delta_small)


def test_series_thread_invariant(tables_small, delta_small):
    xs = checkpoint_schedule(1, 4, 8)
    one = moment_series_sieve(2, xs, tables_small, delta_small, threads=1)
    for t in (2, 4, 7):
        assert moment_series_sieve(2, xs, tables_small, delta_small, threads=t).checkpoints == one.checkpoints


def test_lattice_examples(tables_small, delta_small):
    one = moment_sum_lattice(3, 1, tables_small, delta_small)
    assert one.raw == 16 and one.normalized == 1.0 and one.c == 16
    two = moment_sum_lattice(2, 2, tables_small, delta_small)
    assert two.raw == pytest.approx(16 + 32 * delta_small.lambdas[2] ** 2, rel=1e-15)


@pytest.mark.parametrize("r", range(1, 7))
def test_dual_path(r, tables_small, delta_small):
    for X in (1, 2, 10, 100, 1000, 5000):
        sieve = moment_sum_sieve(r, X, tables_small, delta_small)
        lat = moment_sum_lattice(r, X, tables_small, delta_small)
        assert abs(lat.normalized - sieve) / max(1.0, abs(sieve)) < 1e-6
        assert abs(lat.raw - 16 * sieve) / max(1.0, abs(16 * sieve)) < 1e-6


def test_lattice_series(tables_small, delta_small):
    xs = [10, 100, 1000]
    series = moment_series_lattice(2, xs, tables_small, delta_small, threads=2)
    assert series.normalization == 16.0
    for (x, s), raw in zip(series.checkpoints, series.raw):
        assert s == pytest.approx(moment_sum_sieve(2, x, tables_small, delta_small), rel=1e-12)
        assert raw == pytest.approx(16 * s, rel=1e-15)


def test_independent_of_multiplication_order(tables_small):
    a = delta_coefficients(3000, order="squaring")
    b = delta_coefficients(3000, order="sequential")
    for r in (1, 2, 3):
        assert moment_sum_sieve(r, 3000, tables_small, a) == moment_sum_sieve(r, 3000, tables_small, b)


def test_predictions():
    p4 = predicted_exponents(4)
    assert p4.d_r == 2
    assert p4.gamma_r == pytest.approx(float(Fraction(13, 41) + Fraction(15, 8)), abs=1e-12)
    assert p4.gamma_r == pytest.approx(2.1921, abs=1e-4)
    assert p4.error_exponent == pytest.approx(2 - 1 / (2 * (1 + p4.gamma_r)))
    assert p4.pole_order_degree == 1
    p3 = predicted_exponents(3)
    assert p3.d_r is None
    assert p3.gamma_r == pytest.approx(-1 / 6, abs=1e-15)
    assert p3.error_exponent == pytest.approx(1.4)
    assert any("negative" in f for f in p3.flags)
    p6 = predicted_exponents(6)
    assert p6.d_r is None and any("not an integer" in f for f in p6.flags)
    for r in (1, 2):
        with pytest.raises(InvalidArgument):
            predicted_exponents(r)


def test_growth_exponent_synthetic():
    xs = checkpoint_schedule(3, 6, 8)
    fit = growth_exponent(synthetic(lambda x: x**2, xs))
    assert abs(fit.slope - 2) < 1e-9
    mixed = growth_exponent(synthetic(lambda x: 3 * x**2 + x**1.6, xs), window=(1e4, 1e6))
    assert 1.95 < mixed.slope < 2.05
    with pytest.raises(InvalidArgument):
        growth_exponent(synthetic(lambda x: x, xs[:4]))


def test_main_term_synthetic():
    xs = checkpoint_schedule(3, 6, 8)
    exact = fit_main_term(synthetic(lambda x: 5 * x**2, xs))
    assert abs(exact.C_hat - 5) < 1e-9
    errors = []
    for stop in (4, 5, 6, 7):
        fit = fit_main_term(synthetic(lambda x: 5 * x**2 + 40 * x**1.6, checkpoint_schedule(3, stop, 8)))
        errors.append(abs(fit.C_hat - 5))
        assert fit.residual_power < 2
    assert errors == sorted(errors, reverse=True)
    with pytest.raises(InvalidArgument):
        fit_main_term(synthetic(lambda x: x**2, xs, r=3))
    with pytest.raises(InvalidArgument):
        fit_main_term(synthetic(lambda x: x**2, xs[:5]))


def test_log_polynomial_degree():
    xs = checkpoint_schedule(3, 6, 8)
    fits = log_polynomial_degree(synthetic(lambda x: x**2 * (1 + 0.5 * math.log(x)), xs, r=4))
    assert fits[1]["rms"] < 1e-9 < fits[0]["rms"]


def test_compare_constant():
    out = compare_constant(0.1287, 0.2573)
    assert out["best_match"] == "C/2" and out["within_tolerance"]
    out = compare_constant(0.5, 0.2573)
    assert out["best_match"] == "C" and not out["within_tolerance"]


def test_write_csv(tmp_path, tables_small, delta_small):
    path = tmp_path / "m.csv"
    moment_series_sieve(1, [1, 2], tables_small, delta_small).write_csv(path)
    rows = path.read_text().splitlines()
    assert rows[0] == "r,method,X,S,normalization"
    assert rows[1] == "1,sieve,1,1.0,1.0"
