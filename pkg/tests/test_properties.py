"""Property-based tests (hypothesis) for the exact-arithmetic kernels."""

import math
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from split_thue.algebraic import AlgebraicNumber, poly_eval_sign
from split_thue.precision import (
    contains_zero,
    iv_from_fraction,
    iv_inf,
    iv_sup,
)
from split_thue.solver import solve_bruteforce

rationals = st.fractions(
    min_value=Fraction(-10**6), max_value=Fraction(10**6), max_denominator=10**6
)


@given(rationals)
@settings(max_examples=60, deadline=None)
def test_iv_from_fraction_always_encloses(q):
    x = iv_from_fraction(q, 80)
    assert iv_inf(x) <= q <= iv_sup(x)


@given(rationals.filter(lambda q: q != 0))
@settings(max_examples=40, deadline=None)
def test_rational_height_formula(q):
    # h(p/q) = log max(|p|, q) for a reduced fraction
    h = AlgebraicNumber.from_rational(q).height()
    expected = math.log(max(abs(q.numerator), q.denominator))
    mid = float((iv_inf(h) + iv_sup(h)) / 2)
    assert mid >= -1e-30
    assert abs(mid - expected) < 1e-12


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(1, 40))
@settings(max_examples=40, deadline=None)
def test_poly_eval_sign_matches_exact_value(a, b, d):
    coeffs = (1, a, b)
    pt = Fraction(a, d)
    val = pt * pt + a * pt + b
    assert poly_eval_sign(coeffs, pt) == (val > 0) - (val < 0)


@given(st.integers(1, 25), st.integers(3, 60))
@settings(max_examples=25, deadline=None)
def test_solver_solutions_all_verify(a, gap):
    A, B = a, a + gap
    for s in solve_bruteforce((A, B), 0, 30):
        assert s.verify(A, B)
        assert abs(s.sign) == 1


@given(st.integers(-1000, 1000), st.integers(-1000, 1000), st.integers(5, 15))
@settings(max_examples=30, deadline=None)
def test_siegel_identity_cyclic_sum_vanishes(x, y, n):
    from split_thue.cubic import isolate_roots
    from split_thue.units import siegel_residual
    from split_thue.sequences import FamilyInstance, RecurrentSequence
    from split_thue.precision import PrecisionBudget

    budget = PrecisionBudget(working_bits=128)
    fam = _family(budget)
    rs = _roots(fam, n, budget)
    res = siegel_residual(x, y, rs, budget)
    assert contains_zero(res)


_CACHE = {}


def _family(budget):
    from split_thue.sequences import FamilyInstance, RecurrentSequence

    if "fam" not in _CACHE:
        a = RecurrentSequence.from_recurrence([1, -1, -1], [1, 2])
        b = RecurrentSequence.from_recurrence([1, -2], [2])
        _CACHE["fam"] = FamilyInstance.build(a, b, budget)
    return _CACHE["fam"]


def _roots(fam, n, budget):
    from split_thue.cubic import isolate_roots

    key = ("rs", n)
    if key not in _CACHE:
        _CACHE[key] = isolate_roots(fam, n, budget)
    return _CACHE[key]
