"""Precision budgets, certified interval helpers and three-valued comparisons.

All certified real arithmetic in this package goes through mpmath's interval
context ``mpmath.iv``.  Its precision is a global knob, so every routine that
computes with intervals wraps its work in :func:`interval_bits`.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import iv
from mpmath.libmp import from_rational, round_ceiling, round_floor


class SplitThueError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionExhausted(SplitThueError):
    """Refinement budget ran out before the requested certainty was reached."""


class UndecidedComparison(SplitThueError):
    """An interval comparison stayed undecided after all refinements."""


@dataclass(frozen=True)
class PrecisionBudget:
    working_bits: int = 256
    max_refinements: int = 20

    def __post_init__(self):
        if self.working_bits < 64:
            raise ValueError("working_bits must be >= 64")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")

    def target_width(self):
        """Half-precision width bound used by enclosure contracts."""
        return Fraction(1, 2 ** (self.working_bits // 2))


DEFAULT_BUDGET = PrecisionBudget()


@contextmanager
def interval_bits(bits):
    """Temporarily set the mpmath interval context precision."""
    old = iv.prec
    iv.prec = bits
    try:
        yield iv
    finally:
        iv.prec = old


def iv_from_fraction(value, bits=None):
    """Interval with directed-rounded endpoints enclosing an exact rational."""
    return iv_from_fractions(value, value, bits)


def iv_from_fractions(lo, hi, bits=None):
    """Interval [lo, hi] with rational endpoints, rounded outward.

    The conversion must not pass through ``mpmath.mpf(...)``, which re-rounds
    at the global (often 53-bit) context; ``make_mpf`` keeps the directed
    endpoints exact.
    """
    prec = bits if bits is not None else iv.prec
    lo = Fraction(lo)
    hi = Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    a = mpmath.mp.make_mpf(from_rational(lo.numerator, lo.denominator, prec, round_floor))
    b = mpmath.mp.make_mpf(from_rational(hi.numerator, hi.denominator, prec, round_ceiling))
    return iv.mpf([a, b])


def iv_width(x):
    lo, hi = x._mpi_
    return _raw_to_fraction(hi) - _raw_to_fraction(lo)


def iv_sup(x):
    return _raw_to_fraction(x._mpi_[1])


def iv_inf(x):
    return _raw_to_fraction(x._mpi_[0])


def iv_mid(x):
    lo, hi = x._mpi_
    return (_raw_to_fraction(lo) + _raw_to_fraction(hi)) / 2


def contains_zero(x):
    return iv_inf(x) <= 0 <= iv_sup(x)


def compare(x, y):
    """Three-valued interval comparison: True (x < y), False (x > y) or None."""
    if iv_sup(x) < iv_inf(y):
        return True
    if iv_inf(x) > iv_sup(y):
        return False
    return None


def certified_lt(x, y, refine=None, budget=DEFAULT_BUDGET):
    """Decide x < y, optionally re-evaluating at higher precision via ``refine``.

    ``refine(bits)`` must return a fresh pair of intervals for (x, y).
    Raises UndecidedComparison if the budget is exhausted without a decision.
    """
    verdict = compare(x, y)
    if verdict is not None:
        return verdict
    if refine is None:
        raise UndecidedComparison("interval comparison undecided, no refiner given")
    bits = budget.working_bits
    for _ in range(budget.max_refinements):
        bits *= 2
        x, y = refine(bits)
        verdict = compare(x, y)
        if verdict is not None:
            return verdict
    raise UndecidedComparison("interval comparison undecided after refinement budget")


def certified_sign(x, refine=None, budget=DEFAULT_BUDGET):
    """Certified sign (-1, 0 is never certified, +1) of an interval value."""
    def check(v):
        if iv_inf(v) > 0:
            return 1
        if iv_sup(v) < 0:
            return -1
        return None

    sign = check(x)
    if sign is not None:
        return sign
    if refine is None:
        raise UndecidedComparison("interval sign undecided, no refiner given")
    bits = budget.working_bits
    for _ in range(budget.max_refinements):
        bits *= 2
        x = refine(bits)
        sign = check(x)
        if sign is not None:
            return sign
    raise UndecidedComparison("interval sign undecided after refinement budget")


def _raw_to_fraction(raw):
    sign, man, exp, _ = raw
    man = int(man)
    if man == 0 and exp != 0:
        raise ValueError("non-finite mpf")
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man * (1 << exp))
    return Fraction(man, 1 << -exp)


def mpf_to_fraction(x):
    """Exact Fraction of a finite mpf or degenerate interval endpoint."""
    if hasattr(x, "_mpi_"):
        lo, hi = x._mpi_
        if lo != hi:
            raise ValueError("interval endpoint is not degenerate")
        return _raw_to_fraction(lo)
    return _raw_to_fraction(x._mpf_)


def iv_to_fractions(x):
    """Exact rational endpoints of a real interval."""
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def is_iv_complex(value):
    return isinstance(value, mpmath.ctx_iv.ivmpc)
