import random
from fractions import Fraction

import pytest

from split_thue.cubic import isolate_roots
from split_thue.precision import contains_zero, iv_inf, iv_sup, iv_width
from split_thue.units import (
    KL_CONVENTION,
    NotAUnit,
    RoundingAmbiguous,
    norm_form,
    regulator,
    siegel_gamma,
    siegel_residual,
    solution_type,
    unit_decompose,
    verify_regulator_growth,
    verify_xi_bound,
    xi_form,
    xi_value,
)


@pytest.fixture(scope="module")
def rs20(fib_pow2, budget):
    return isolate_roots(fib_pow2, 20, budget)


def test_kl_convention_complementary():
    for j, (k, l) in KL_CONVENTION.items():
        assert {j, k, l} == {1, 2, 3}


def test_regulator_pair_independence(rs20, budget):
    bits = budget.working_bits
    r12 = regulator(rs20, (1, 2), bits)
    r23 = regulator(rs20, (2, 3), bits)
    r13 = regulator(rs20, (1, 3), bits)
    vals = [(iv_inf(r) + iv_sup(r)) / 2 for r in (r12, r23, r13)]
    spread = max(vals) - min(vals)
    assert spread < Fraction(1, 2**40)
    assert iv_width(r12) < Fraction(1, 2**40)


def test_regulator_rejects_degenerate_pair(rs20):
    with pytest.raises(ValueError):
        regulator(rs20, (2, 2))


def test_regulator_growth(fib_pow2, budget):
    rep = verify_regulator_growth(fib_pow2, 30, 80, tol_fit=0.1, samples=5, budget=budget)
    assert rep.passed
    assert rep.pair_independent
    assert abs(rep.limit - 1.1476) < 0.01
    # R(n)/n^2 should already be close at n = 80
    assert rep.rel_dev_at_top < 0.05


def test_norm_form_on_trivial_solutions(fib_pow2):
    A, B = fib_pow2.terms(9)
    assert norm_form(1, 0, A, B) == 1
    assert norm_form(0, 1, A, B) == -1
    assert norm_form(A, 1, A, B) == -1
    assert norm_form(B, 1, A, B) == -1


def test_unit_decompose_trivial_solutions(fib_pow2, rs20):
    A, B = rs20.A, rs20.B
    expected = {
        (1, 0): (0, 0, 1),
        (0, 1): (1, 0, -1),
        (A, 1): (0, 1, -1),
        (B, 1): (-1, -1, -1),
    }
    for (x, y), (b1, b2, sign) in expected.items():
        ue = unit_decompose(x, y, rs20)
        assert (ue.b1, ue.b2, ue.sign) == (b1, b2, sign)
        assert ue.residual < 1e-6
        # mirror solution flips only the sign
        um = unit_decompose(-x, -y, rs20)
        assert (um.b1, um.b2, um.sign) == (b1, b2, -sign)


def test_unit_decompose_alt_units(rs20):
    ue = unit_decompose(1, 0, rs20, alt_units=True)
    assert (ue.b1, ue.b2) == (0, 0) and ue.alt_units


def test_unit_decompose_rejects_non_unit(rs20):
    with pytest.raises(NotAUnit):
        unit_decompose(5, 1, rs20)


def test_solution_type(fib_pow2, rs20):
    A, B = rs20.A, rs20.B
    assert solution_type(1, 0, rs20) == 1
    assert solution_type(B, 1, rs20) == 1  # x - lambda1 y smallest near B
    assert solution_type(A, 1, rs20) == 2
    assert solution_type(0, 1, rs20) == 3


def test_siegel_gamma_small_for_solution(rs20):
    A = rs20.A
    gamma, lam = siegel_gamma(A, 1, rs20, 2)
    assert iv_sup(abs(gamma)) < Fraction(1, 10**10)
    assert iv_sup(abs(lam)) < Fraction(1, 10**10)


def test_siegel_residual_encloses_zero(rs20):
    rng = random.Random(7)
    for _ in range(25):
        x = rng.randint(-1000, 1000)
        y = rng.randint(-1000, 1000)
        res = siegel_residual(x, y, rs20)
        assert contains_zero(res)
        assert iv_width(res) < Fraction(1, 2**60)


def test_xi_form_vanishing_coefficients_on_trivial_solutions():
    # each trivial solution's exponent vector must make its transformed
    # form identically small; coefficient tables at those exponents:
    n = 15
    # type 1, (B,1): b = (-1, -1)
    xi = xi_form(1, "strict", n, -1, -1)
    assert all(c == 0 for _, c in xi.terms[:3])
    # type 2, (A,1): b = (0, 1)
    xi = xi_form(2, "strict", n, 0, 1)
    assert all(c == 0 for _, c in xi.terms)
    # type 3, (0,1): b = (1, 0)
    xi = xi_form(3, "strict", n, 1, 0)
    assert all(c == 0 for _, c in xi.terms)
    # type 1, (1,0): b = (0, 0)
    xi = xi_form(1, "strict", n, 0, 0)
    assert all(c == 0 for _, c in xi.terms[:3])


def test_xi_form_rejects_bad_input():
    with pytest.raises(ValueError):
        xi_form(4, "strict", 3, 0, 0)
    with pytest.raises(ValueError):
        xi_form(1, "other", 3, 0, 0)


def test_xi_bound_on_trivial_solutions(fib_pow2, fib_pow2_consts, budget):
    for n in (15, 20, 30):
        rs = isolate_roots(fib_pow2, n, budget)
        A, B = rs.A, rs.B
        for x, y in ((1, 0), (0, 1), (A, 1), (B, 1)):
            j = solution_type(x, y, rs, budget)
            ue = unit_decompose(x, y, rs, budget)
            xi = xi_form(j, fib_pow2.case_tag, n, ue.b1, ue.b2)
            rep = verify_xi_bound(xi, fib_pow2, fib_pow2_consts, n)
            assert rep.ok, (n, x, y, rep.value, rep.bound)


def test_xi_value_matches_computed_form(fib_pow2, rs20, fib_pow2_consts, budget):
    """The tabulated linear form must agree with the directly computed
    log-combination on a solution's exponents."""
    A = rs20.A
    ue = unit_decompose(A, 1, rs20, budget)
    xi = xi_form(2, fib_pow2.case_tag, 20, ue.b1, ue.b2)
    val = xi_value(xi, fib_pow2)
    assert iv_sup(abs(val)) < Fraction(1, 10**3)


def test_verify_xi_bound_requires_solution_context(fib_pow2, fib_pow2_consts):
    xi = xi_form(1, "strict", 10, 3, 5)
    with pytest.raises(ValueError):
        verify_xi_bound(xi, fib_pow2, fib_pow2_consts, 10, from_solution=False)
