"""Counting bounds, the generating-function relaxation, and the growth constant."""

import math
import random
from decimal import Decimal
from fractions import Fraction

import pytest

from trislice.bounds import (
    asymptotic_constant,
    binomial,
    count_low_weight,
    finite_lower_bound,
    gf_bound,
    growth_trend,
    max_binomial_term,
    optimal_t,
    rank_ceiling,
    _phi,
)
from trislice.tensors import TriangleParams


def gf_exact(n: int, r: int, t: Fraction) -> Fraction:
    return (1 + t) ** n / t**r


def test_binomial():
    assert binomial(7, 4) == 35
    assert binomial(9, 4) == 126
    assert binomial(12, 0) == 1
    with pytest.raises(ValueError):
        binomial(4, 5)
    with pytest.raises(ValueError):
        binomial(4, -1)


def test_count_low_weight():
    assert count_low_weight(9, 4) == 256  # half of 2^9 by symmetry
    assert count_low_weight(5, 2) == 16
    assert count_low_weight(6, 6) == 64
    assert count_low_weight(6, 99) == 64
    with pytest.raises(ValueError):
        count_low_weight(6, -1)


def test_gf_bound_examples():
    v = gf_bound(9, 4, Fraction(4, 5))
    exact = gf_exact(9, 4, Fraction(4, 5))  # = 387420489/800000
    assert exact == Fraction(387420489, 800000)
    assert abs(v - Decimal(exact.numerator) / Decimal(exact.denominator)) < Decimal("1e-40")
    assert v >= 256

    assert gf_bound(5, 0, Fraction(1, 2)) == Decimal("7.59375")  # (1+t)^n at r=0
    assert gf_bound(1, 1, Fraction(1, 2)) == 3
    with pytest.raises(ValueError):
        gf_bound(5, 2, Fraction(3, 2))
    with pytest.raises(ValueError):
        gf_bound(5, 2, 0)


def test_gf_bound_dominates_exact_count():
    rng = random.Random(23)
    for _ in range(300):
        n = rng.randrange(2, 200)
        r = rng.randrange(1, max(2, n // 2))
        t = Fraction(rng.randrange(1, 1000), 1000)
        assert gf_exact(n, r, t) >= count_low_weight(n, r)


def test_optimal_t():
    assert optimal_t(9, 4) == Fraction(4, 5)
    assert optimal_t(3, 1) == Fraction(1, 2)
    with pytest.raises(ValueError):
        optimal_t(8, 4)  # r = n/2 leaves (0,1)


def test_rolling_prime_matches_direct_selection():
    from trislice.bounds import _advance_prime
    from trislice.tensors import smallest_odd_prime_above

    p = 3
    for k in range(1, 2001):
        p = _advance_prime(p, k)
        assert p == smallest_odd_prime_above(Fraction(k, 4))


@pytest.mark.parametrize("n,r", [(9, 4), (3, 1), (20, 7)])
def test_optimal_t_matches_grid_argmin(n, r):
    t_star = optimal_t(n, r)
    grid = [Fraction(i, 10_000) for i in range(1, 10_000)]
    best = min(grid, key=lambda t: gf_exact(n, r, t))
    assert abs(best - t_star) <= Fraction(1, 10_000)


def test_rank_ceiling():
    assert rank_ceiling(TriangleParams.for_slice(9, 4), "exact") == 768
    assert rank_ceiling(TriangleParams.for_slice(7, 4), "exact") == 192
    for n, k in [(9, 4), (7, 4), (12, 6), (4, 2)]:
        params = TriangleParams.for_slice(n, k)
        exact = rank_ceiling(params, "exact")
        gf = rank_ceiling(params, "gf")
        assert Decimal(exact) <= gf
    # cap >= n/2 exercises the t->1 fallback
    params = TriangleParams.for_slice(4, 2)  # degree bound 8, cap 2 = n/2
    assert rank_ceiling(params, "gf") == 3 * Decimal(2) ** 4


def test_max_binomial_term_examples():
    k, v = max_binomial_term(4, Fraction(1, 2))
    assert (k, v) == (1, Fraction(2))
    assert Fraction(81, 16) / 5 < v < Fraction(81, 16)  # (1+x)^n sandwich

    assert max_binomial_term(1, Fraction(1, 2)) == (0, Fraction(1))
    assert max_binomial_term(6, Fraction(99, 100))[0] == 3  # near x=1 the middle wins
    with pytest.raises(ValueError):
        max_binomial_term(5, Fraction(3, 2))


def test_max_binomial_term_sandwich_random():
    rng = random.Random(31)
    for _ in range(200):
        n = rng.randrange(1, 80)
        x = Fraction(rng.randrange(1, 1000), 1000)
        _, v = max_binomial_term(n, x)
        total = (1 + x) ** n
        assert total / (n + 1) < v < total


def test_finite_lower_bound_exact():
    table = finite_lower_bound(9)
    assert table.mode == "exact"
    assert len(table.rows) == 4
    row = next(r for r in table.rows if r.k == 4)
    assert row.slice_size == 126
    assert row.rank_ceiling_exact == 768
    assert row.ratio == Fraction(126, 768)
    assert row.chromatic_lb == 1
    assert table.best.k == 4  # largest slice/ceiling ratio at n=9

    small = finite_lower_bound(2)
    assert small.rows[0].slice_size == 2
    assert small.rows[0].chromatic_lb == 1

    picked = finite_lower_bound(9, ks=[2, 4])
    assert [r.k for r in picked.rows] == [2, 4]
    with pytest.raises(ValueError):
        finite_lower_bound(9, ks=[5])


def test_finite_lower_bound_log_mode():
    table = finite_lower_bound(20_001)
    assert table.mode == "log"
    assert table.best.slice_size is None
    assert 1.0 < table.best.ratio_root < 1.01447
    sub = finite_lower_bound(20_001, ks=[10_000])
    assert sub.rows[0].k == 10_000

    # exact and log agree on the float fields
    exact = finite_lower_bound(64, mode="exact")
    logm = finite_lower_bound(64, mode="log")
    assert exact.best.k == logm.best.k
    assert math.isclose(exact.best.log_ratio, logm.best.log_ratio)


def test_growth_trend_small():
    rows = growth_trend([1000, 3162])
    assert rows[0].ratio_root < rows[1].ratio_root
    for row in rows:
        assert 1.0 < row.ratio_root < 1.01447
        assert row.eps0 == float(row.n) ** 0.525
        assert row.eps0_correction is not None and 0 < row.eps0_correction < 1


def test_asymptotic_constant_value():
    result = asymptotic_constant(digits=5)
    assert result.c_string() == "0.01446"
    assert result.bracket <= Decimal("1e-5")
    assert result.t_star ** (Decimal(1) / 3) > Decimal("0.5")

    ten = asymptotic_constant(digits=10)
    assert ten.c_string().startswith("0.01446")
    assert ten.c_string() == "0.0144621066"

    with pytest.raises(ValueError):
        asymptotic_constant(digits=0)


def test_asymptotic_constant_stability():
    d6 = asymptotic_constant(digits=6)
    d11 = asymptotic_constant(digits=11)
    assert str(d11.c.quantize(Decimal("1e-6"))) == d6.c_string()


def test_phi_values():
    # endpoint and a sampled interior point of the growth-rate function
    assert _phi(Decimal(1)) == 1
    v = _phi(Decimal("0.5"))
    assert Decimal("1.0005") < v < Decimal("1.0006")
    assert v < asymptotic_constant(digits=6).phi_value


def test_predicted_weight_fraction():
    result = asymptotic_constant(digits=8)
    frac = result.predicted_weight_fraction
    assert Decimal("0.4855") < frac < Decimal("0.4856")
