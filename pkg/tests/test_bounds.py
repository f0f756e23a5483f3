import math
from fractions import Fraction

import pytest

from split_thue.bounds import (
    C_RANK2_CUBIC,
    baker_constant,
    baker_lower,
    bugy_bound,
    bugy_constant,
    compute_n0,
    exponent_bound_B,
    field_degree,
    log_coeff_bound,
    logH_upper,
    logy_lower_eq8,
    logy_lower_altunit,
    logy_upper,
    regulator_bounds,
    xi_heights,
    xi_upper_log,
)
from split_thue.cubic import isolate_roots
from split_thue.precision import SplitThueError
from split_thue.units import regulator
from split_thue.precision import iv_inf, iv_sup


def test_bugy_constant_rank2_cubic_exact():
    # 3^(2+27) * 3^(7*2+19) * 3^(2*3+6*2+14) = 3^29 * 3^33 * 3^32 = 3^94
    assert bugy_constant(2, 3) == 3**94
    assert C_RANK2_CUBIC == 3**94


def test_bugy_bound_micro_instance():
    # R = 1, log H = 0: bound is exactly C * 1 * 1 * (1 + 0 + 1) = 2 * 3^94
    val = bugy_bound(Fraction(1), Fraction(0))
    assert val == 2 * 3**94


def test_bugy_bound_monotone():
    a = bugy_bound(Fraction(10), Fraction(5))
    b = bugy_bound(Fraction(20), Fraction(5))
    assert b > a
    with pytest.raises(ValueError):
        bugy_bound(Fraction(0), Fraction(1))


def test_baker_constant_micro_instance():
    # t = 1, D = 1: 18 * 2! * 1 * 32^3 = 1179648
    assert baker_constant(1, 1) == 18 * 2 * 32**3 == 1179648


def test_baker_lower_micro_instance():
    # t=1, D=1, h=1, B=e (log B = 1): -K log(2) * 1 * 1
    val = baker_lower([Fraction(1)], 1, Fraction(1))
    expected = -1179648 * math.log(2)
    assert abs(float(val) - expected) < 1e-9 * abs(expected)


def test_baker_lower_enforces_height_floor():
    with pytest.raises(SplitThueError):
        baker_lower([Fraction(1, 100)], 1, Fraction(1))
    with pytest.raises(ValueError):
        baker_lower([Fraction(1)], 1, Fraction(1), t=2)


def test_field_degree(fib_pow2, budget):
    assert field_degree(fib_pow2, budget) == 2


def test_log_coeff_bound_positive(fib_pow2, fib_pow2_consts):
    m = log_coeff_bound(fib_pow2, 10)
    assert m > 0


def test_regulator_bounds_bracket_true_regulator(fib_pow2, fib_pow2_consts, budget):
    """Closed-form regulator enclosure must contain the regulator computed
    from certified root isolation."""
    for n in (20, 40):
        lo, up = regulator_bounds(fib_pow2, fib_pow2_consts, n)
        rs = isolate_roots(fib_pow2, n, budget)
        r = regulator(rs, (1, 2), budget.working_bits)
        assert lo <= iv_inf(r) and iv_sup(r) <= up
        assert lo > 0


def test_logy_upper_scales_like_n4(fib_pow2, fib_pow2_consts):
    u1 = logy_upper(fib_pow2, fib_pow2_consts, 100)
    u2 = logy_upper(fib_pow2, fib_pow2_consts, 200)
    ratio = float(u2.value / u1.value)
    assert 8 < ratio < 32  # between n^3 and n^5 growth


def test_xi_heights_strict_case(fib_pow2, budget):
    hs = xi_heights(fib_pow2, 20, 2, budget)
    labels = [lab for lab, _ in hs]
    assert labels == ["alpha", "beta", "cA", "cB"]
    floor = Fraction(16, 100) / 2
    assert all(h >= floor for _, h in hs)


def test_exponent_bound_B_positive(fib_pow2, fib_pow2_consts):
    lo, _ = regulator_bounds(fib_pow2, fib_pow2_consts, 50)
    ly = logy_upper(fib_pow2, fib_pow2_consts, 50)
    bound = exponent_bound_B(fib_pow2, fib_pow2_consts, 50, ly.value, lo)
    assert bound > 0
    with pytest.raises(ValueError):
        exponent_bound_B(fib_pow2, fib_pow2_consts, 50, ly.value, Fraction(0))


def test_xi_upper_log_decreases(fib_pow2, fib_pow2_consts):
    v100 = xi_upper_log(fib_pow2, fib_pow2_consts, 100)
    v200 = xi_upper_log(fib_pow2, fib_pow2_consts, 200)
    assert v200 < v100 < 0


def test_logy_lower_altunit(fib_pow2, fib_pow2_consts):
    # vacuous at small n, then exponentially growing
    assert logy_lower_altunit(fib_pow2, fib_pow2_consts, 5) == 0
    v600 = logy_lower_altunit(fib_pow2, fib_pow2_consts, 600)
    v700 = logy_lower_altunit(fib_pow2, fib_pow2_consts, 700)
    assert 0 < v600 < v700


def test_logy_lower_eq8_is_vacuous_at_desk_scale(fib_pow2, fib_pow2_consts):
    # with fully explicit constants the direct-application chain gives no
    # information at reachable n; it must still never exceed the upper bound
    v = logy_lower_eq8(fib_pow2, fib_pow2_consts, 100, 2)
    u = logy_upper(fib_pow2, fib_pow2_consts, 100)
    assert 0 <= v <= u.value


def test_compute_n0_small_cap_reports_no_crossing(fib_pow2, fib_pow2_consts, budget):
    res = compute_n0(fib_pow2, fib_pow2_consts, n_cap=10**4, budget=budget)
    assert res.no_crossing and res.n0 is None


def test_compute_n0_finite_at_large_cap(fib_pow2, fib_pow2_consts, budget):
    res = compute_n0(fib_pow2, fib_pow2_consts, n_cap=10**25, budget=budget)
    assert not res.no_crossing
    assert res.n0 == 59362923407947908538
    assert set(res.branch_thresholds) == {"xi-j2", "xi-j3", "altunit-j1"}
    assert res.branch_thresholds["altunit-j1"] == 568
