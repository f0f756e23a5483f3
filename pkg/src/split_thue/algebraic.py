"""Certified arithmetic on real and complex algebraic numbers.

An algebraic number is stored as its primitive integer minimal polynomial
together with a rational-endpoint box isolating exactly one root.  Root
isolation and exact polynomial algebra are delegated to sympy; numerical
enclosures use mpmath intervals (:mod:`split_thue.precision`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy as sp
from mpmath import iv

from .precision import (
    DEFAULT_BUDGET,
    PrecisionBudget,
    PrecisionExhausted,
    SplitThueError,
    interval_bits,
    iv_from_fractions,
    iv_sup,
    iv_width,
)

_X = sp.Symbol("x")


class ZeroArgument(SplitThueError):
    """An operation received a zero argument it cannot handle."""


class DivisionByZero(SplitThueError):
    pass


@dataclass(frozen=True)
class RealEnclosure:
    lo: Fraction
    hi: Fraction

    @property
    def is_real(self):
        return True

    def width(self):
        return self.hi - self.lo

    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, value):
        return self.lo <= value <= self.hi

    def intersects(self, other):
        if isinstance(other, ComplexEnclosure):
            return other.intersects(self)
        return self.lo <= other.hi and other.lo <= self.hi

    def as_iv(self, bits):
        return iv_from_fractions(self.lo, self.hi, bits)


@dataclass(frozen=True)
class ComplexEnclosure:
    re_lo: Fraction
    re_hi: Fraction
    im_lo: Fraction
    im_hi: Fraction

    @property
    def is_real(self):
        return False

    def width(self):
        return max(self.re_hi - self.re_lo, self.im_hi - self.im_lo)

    def intersects(self, other):
        if isinstance(other, RealEnclosure):
            other = ComplexEnclosure(other.lo, other.hi, Fraction(0), Fraction(0))
        return (
            self.re_lo <= other.re_hi
            and other.re_lo <= self.re_hi
            and self.im_lo <= other.im_hi
            and other.im_lo <= self.im_hi
        )

    def conjugate(self):
        return ComplexEnclosure(self.re_lo, self.re_hi, -self.im_hi, -self.im_lo)

    def as_iv(self, bits):
        re = iv_from_fractions(self.re_lo, self.re_hi, bits)
        im = iv_from_fractions(self.im_lo, self.im_hi, bits)
        return iv.mpc(re, im)


def _normalize_coeffs(coeffs):
    """Strip leading zeros, divide by content, force positive leading coeff."""
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if not coeffs:
        raise ValueError("zero polynomial")
    g = 0
    for c in coeffs:
        g = math.gcd(g, abs(c))
    coeffs = [c // g for c in coeffs]
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    return tuple(coeffs)


@lru_cache(maxsize=4096)
def _is_irreducible(coeffs):
    return sp.Poly(list(coeffs), _X).is_irreducible


def _sympy_rational_to_fraction(r):
    r = sp.Rational(r)
    return Fraction(int(r.p), int(r.q))


@lru_cache(maxsize=1024)
def _isolate_all(coeffs, eps_bits):
    """All roots of an integer polynomial as exact isolating boxes.

    Returns a tuple of RealEnclosure / ComplexEnclosure, real roots first,
    complex roots in conjugate pairs, pairwise disjoint.
    """
    poly = sp.Poly(list(coeffs), _X)
    eps = sp.Rational(1, 2**eps_bits)
    real_iv, complex_iv = poly.intervals(all=True, eps=eps)
    out = []
    for (a, b), _mult in real_iv:
        out.append(RealEnclosure(_sympy_rational_to_fraction(a), _sympy_rational_to_fraction(b)))
    for (c1, c2), _mult in complex_iv:
        re1, im1 = c1.as_real_imag()
        re2, im2 = c2.as_real_imag()
        out.append(
            ComplexEnclosure(
                _sympy_rational_to_fraction(sp.Min(re1, re2)),
                _sympy_rational_to_fraction(sp.Max(re1, re2)),
                _sympy_rational_to_fraction(sp.Min(im1, im2)),
                _sympy_rational_to_fraction(sp.Max(im1, im2)),
            )
        )
    return tuple(out)


def poly_eval_sign(coeffs, point):
    """Exact sign of an integer polynomial at a rational point."""
    point = Fraction(point)
    p, q = point.numerator, point.denominator
    d = len(coeffs) - 1
    acc = 0
    for i, c in enumerate(coeffs):
        acc += c * p ** (d - i) * q**i
    return (acc > 0) - (acc < 0)


def root_separation_lower(coeffs):
    """Crude positive lower bound on the distance between distinct roots.

    Mahler's bound: sep(p) > sqrt(3) * d^(-(d+2)/2) * ||p||_2^(-(d-1)).
    Returned as a Fraction below the true bound.
    """
    d = len(coeffs) - 1
    if d < 2:
        return Fraction(1)
    norm2_sq = sum(c * c for c in coeffs)
    # sqrt(3)/d^((d+2)/2) > 1/d^(d+2) and ||p||_2^(d-1) <= norm2_sq^(d-1)
    return Fraction(1, d ** (d + 2) * norm2_sq ** (d - 1))


class AlgebraicNumber:
    """A root of an irreducible primitive integer polynomial, designated by
    an isolating rational box."""

    __slots__ = ("min_poly", "enclosure", "_tight")

    def __init__(self, min_poly, enclosure, _validate=True):
        coeffs = _normalize_coeffs(min_poly)
        if _validate:
            if len(coeffs) >= 3 and not _is_irreducible(coeffs):
                raise ValueError("min_poly must be irreducible over Q")
            if len(coeffs) == 1:
                raise ValueError("min_poly must have a root")
        object.__setattr__(self, "min_poly", coeffs)
        object.__setattr__(self, "enclosure", enclosure)
        object.__setattr__(self, "_tight", enclosure)

    def __setattr__(self, name, value):
        if name == "_tight":
            object.__setattr__(self, name, value)
        else:
            raise AttributeError("AlgebraicNumber is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rational(cls, value):
        value = Fraction(value)
        return cls(
            (value.denominator, -value.numerator),
            RealEnclosure(value, value),
            _validate=False,
        )

    @classmethod
    def from_real_root(cls, coeffs, near):
        """Designate the real root of ``coeffs`` closest to ``near``."""
        coeffs = _normalize_coeffs(coeffs)
        boxes = [b for b in _isolate_all(coeffs, 32) if b.is_real]
        if not boxes:
            raise ValueError("polynomial has no real root")
        near = Fraction(near)
        best = min(boxes, key=lambda b: abs(b.mid() - near))
        return cls(coeffs, best, _validate=False) if _is_irreducible(coeffs) else _factor_pick(coeffs, best)

    @classmethod
    def from_sympy(cls, expr, bits=64):
        """Build from an exact sympy expression (must be algebraic)."""
        expr = sp.nsimplify(expr, rational=False) if expr.free_symbols else expr
        if expr.is_Rational:
            return cls.from_rational(Fraction(int(expr.p), int(expr.q)))
        poly = sp.minimal_polynomial(expr, _X, polys=True)
        coeffs = _normalize_coeffs(poly.all_coeffs())
        val = sp.nsimplify(expr).evalf(60)
        re = Fraction(str(sp.re(val)))
        im = Fraction(str(sp.im(val)))
        eps_bits = 64
        while eps_bits <= 2**14:
            boxes = _isolate_all(coeffs, eps_bits)
            hits = [b for b in boxes if _box_contains_point(b, re, im, slack=Fraction(1, 2**50))]
            if len(hits) == 1:
                return cls(coeffs, hits[0], _validate=False)
            eps_bits *= 2
        raise PrecisionExhausted("could not designate root for sympy expression")

    # -- basic structure ---------------------------------------------------

    @property
    def degree(self):
        return len(self.min_poly) - 1

    @property
    def is_real(self):
        return self.enclosure.is_real

    @property
    def is_rational(self):
        return self.degree == 1

    def as_fraction(self):
        if not self.is_rational:
            raise ValueError("not rational")
        return Fraction(-self.min_poly[1], self.min_poly[0])

    @property
    def is_zero(self):
        return self.min_poly == (1, 0)

    def __repr__(self):
        if self.is_rational:
            return f"AlgebraicNumber({self.as_fraction()})"
        mid = self.enclosure.mid() if self.is_real else None
        loc = float(mid) if mid is not None else "complex"
        return f"AlgebraicNumber(deg={self.degree}, ~{loc})"

    def __eq__(self, other):
        if not isinstance(other, AlgebraicNumber):
            try:
                other = AlgebraicNumber.from_rational(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.min_poly != other.min_poly:
            return False
        if self.is_rational:
            return True
        sep = root_separation_lower(self.min_poly)
        a = self.refined(sep / 4)
        b = other.refined(sep / 4)
        return a.intersects(b)

    def __hash__(self):
        return hash(self.min_poly)

    # -- enclosure refinement ----------------------------------------------

    def refined(self, width):
        """Tightened enclosure of the designated root, width <= ``width``."""
        width = Fraction(width)
        box = self._tight
        if box.width() <= width:
            return box
        if box.is_real:
            box = self._refine_real(box, width)
        else:
            box = self._refine_complex(box, width)
        self._tight = box
        return box

    def _refine_real(self, box, width):
        lo, hi = box.lo, box.hi
        if self.is_rational:
            return box
        s_lo = poly_eval_sign(self.min_poly, lo)
        if s_lo == 0:  # endpoint hit a root of another factor; nudge
            lo -= (hi - lo) / 7
            s_lo = poly_eval_sign(self.min_poly, lo)
        while hi - lo > width:
            mid = (lo + hi) / 2
            s_mid = poly_eval_sign(self.min_poly, mid)
            if s_mid == 0:
                # irreducible deg>=2 has no rational roots; cannot happen
                raise AssertionError("rational root of irreducible polynomial")
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        return RealEnclosure(lo, hi)

    def _refine_complex(self, box, width):
        target = Fraction(width)
        eps_bits = 34
        while eps_bits <= 2**16:
            boxes = _isolate_all(self.min_poly, eps_bits)
            hits = [b for b in boxes if b.intersects(box)]
            if len(hits) == 1:
                box = hits[0]
                if box.width() <= target:
                    return box
            eps_bits *= 2
        raise PrecisionExhausted("complex enclosure refinement failed")

    def intersects(self, other):
        return self._tight.intersects(other._tight)

    def approx(self, bits):
        """mpmath interval (iv.mpf or iv.mpc) of width about 2^-bits (relative)."""
        if self.is_rational:
            with interval_bits(bits + 8):
                return iv_from_fractions(self.as_fraction(), self.as_fraction(), bits + 8)
        box = self._tight
        scale = max(
            abs(box.mid() if box.is_real else box.re_lo + box.re_hi), Fraction(1)
        )
        self.refined(scale * Fraction(1, 2**bits))
        with interval_bits(bits + 8):
            return self._tight.as_iv(bits + 8)

    # -- number-theoretic operations ---------------------------------------

    def conjugates(self, budget=DEFAULT_BUDGET):
        """Disjoint enclosures of all roots of min_poly, complex in pairs."""
        eps_bits = budget.working_bits // 2
        boxes = _isolate_all(self.min_poly, eps_bits)
        if len(boxes) != self.degree:
            raise PrecisionExhausted("root isolation returned wrong count")
        return list(boxes)

    def height(self, budget=DEFAULT_BUDGET):
        """Enclosure of the absolute logarithmic height."""
        d = self.degree
        lead = self.min_poly[0]
        target = budget.target_width()
        bits = budget.working_bits
        for _ in range(budget.max_refinements):
            with interval_bits(bits):
                boxes = _isolate_all(self.min_poly, bits)
                total = iv.log(iv_from_fractions(lead, lead, bits))
                for box in boxes:
                    mag = abs(box.as_iv(bits))
                    total += _log_plus(mag)
                result = total / d
                if iv_width(result) <= target:
                    return result
            bits *= 2
        raise PrecisionExhausted("height enclosure did not converge")

    def log_abs(self, budget=DEFAULT_BUDGET):
        """Enclosure of log|x|; raises ZeroArgument on x = 0."""
        if self.is_zero:
            raise ZeroArgument("log_abs of zero")
        target = budget.target_width()
        bits = budget.working_bits
        for _ in range(budget.max_refinements):
            with interval_bits(bits):
                result = iv.log(abs(self.approx(bits)))
                if iv_width(result) <= target:
                    return result
            bits *= 2
        raise PrecisionExhausted("log_abs enclosure did not converge")

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        if self.is_rational:
            return AlgebraicNumber.from_rational(-self.as_fraction())
        d = self.degree
        coeffs = [c if (d - i) % 2 == 0 else -c for i, c in enumerate(self.min_poly)]
        box = self.enclosure
        if box.is_real:
            nbox = RealEnclosure(-box.hi, -box.lo)
        else:
            nbox = ComplexEnclosure(-box.re_hi, -box.re_lo, -box.im_hi, -box.im_lo)
        return AlgebraicNumber(coeffs, nbox, _validate=False)

    def inverse(self):
        if self.is_zero:
            raise DivisionByZero("inverse of zero")
        if self.is_rational:
            return AlgebraicNumber.from_rational(1 / self.as_fraction())
        return field_arith(AlgebraicNumber.from_rational(1), self, "div")

    def __add__(self, other):
        return field_arith(self, _coerce(other), "add")

    def __radd__(self, other):
        return field_arith(_coerce(other), self, "add")

    def __sub__(self, other):
        return field_arith(self, _coerce(other), "sub")

    def __rsub__(self, other):
        return field_arith(_coerce(other), self, "sub")

    def __mul__(self, other):
        return field_arith(self, _coerce(other), "mul")

    def __rmul__(self, other):
        return field_arith(_coerce(other), self, "mul")

    def __truediv__(self, other):
        return field_arith(self, _coerce(other), "div")


def _coerce(value):
    if isinstance(value, AlgebraicNumber):
        return value
    return AlgebraicNumber.from_rational(value)


def _log_plus(mag):
    """Interval of log max(|.|, 1) from an interval of |.|."""
    one = iv.mpf(1)
    if mag.b <= one.a:
        return iv.mpf(0)
    if mag.a >= one.b:
        return iv.log(mag)
    hi = iv.log(iv.mpf([1, mag.b]))
    return iv_from_fractions(0, iv_sup(hi))


def _box_contains_point(box, re, im, slack=Fraction(0)):
    if box.is_real:
        return abs(im) <= slack and box.lo - slack <= re <= box.hi + slack
    return (
        box.re_lo - slack <= re <= box.re_hi + slack
        and box.im_lo - slack <= im <= box.im_hi + slack
    )


def _factor_pick(coeffs, box):
    """Pick the irreducible factor of a reducible polynomial owning ``box``."""
    poly = sp.Poly(list(coeffs), _X)
    _, factors = poly.factor_list()
    for fac, _mult in factors:
        fc = _normalize_coeffs(fac.all_coeffs())
        if len(fc) < 2:
            continue
        for b in _isolate_all(fc, 32):
            if b.intersects(box):
                return AlgebraicNumber(fc, b, _validate=False)
    raise ValueError("no factor root in the given box")


# -- exact field arithmetic ------------------------------------------------


_Y = sp.Symbol("y")


@lru_cache(maxsize=4096)
def _resultant_poly(a_coeffs, b_coeffs, op):
    """Integer polynomial annihilating a `op` b via resultants."""
    fa = sum(c * _Y ** (len(a_coeffs) - 1 - i) for i, c in enumerate(a_coeffs))
    db = len(b_coeffs) - 1
    if op == "add":
        fb = sum(c * (_X - _Y) ** (db - i) for i, c in enumerate(b_coeffs))
    elif op == "mul":
        # homogenized: sum b_i X^(db-i) Y^i annihilates X = a*b at Y = a
        fb = sum(c * _X ** (db - i) * _Y**i for i, c in enumerate(b_coeffs))
    else:
        raise ValueError(op)
    res = sp.resultant(fa, fb, _Y)
    poly = sp.Poly(res, _X)
    _, factors = poly.factor_list()
    out = []
    for fac, _mult in factors:
        fc = _normalize_coeffs(fac.all_coeffs())
        if len(fc) >= 2:
            out.append(fc)
    return tuple(out)


def field_arith(a, b, op, budget=DEFAULT_BUDGET):
    """Exact algebraic arithmetic: result has its own minimal polynomial.

    The result polynomial is found via resultants; the designated root is the
    unique candidate compatible with interval arithmetic on the operands.
    """
    if op not in ("add", "sub", "mul", "div"):
        raise ValueError(f"unknown op {op!r}")
    if op == "sub":
        return field_arith(a, -b, "add", budget)
    if op == "div":
        if b.is_zero:
            raise DivisionByZero("division by zero algebraic number")
        if b.is_rational:
            return field_arith(a, AlgebraicNumber.from_rational(1 / b.as_fraction()), "mul", budget)
        inv_coeffs = _normalize_coeffs(tuple(reversed(b.min_poly)))
        b_inv = _designate_from_iv(
            (inv_coeffs,), lambda bits: 1 / b.approx(bits), budget
        )
        return field_arith(a, b_inv, "mul", budget)

    # rational fast paths
    if a.is_rational and b.is_rational:
        if op == "add":
            return AlgebraicNumber.from_rational(a.as_fraction() + b.as_fraction())
        return AlgebraicNumber.from_rational(a.as_fraction() * b.as_fraction())
    if op == "mul" and (a.is_zero or b.is_zero):
        return AlgebraicNumber.from_rational(0)

    candidates = _resultant_poly(a.min_poly, b.min_poly, op)

    def value(bits):
        with interval_bits(bits):
            av, bv = a.approx(bits), b.approx(bits)
            return av + bv if op == "add" else av * bv

    return _designate_from_iv(candidates, value, budget)


def _designate_from_iv(candidate_polys, value_fn, budget=DEFAULT_BUDGET):
    """Select the unique (factor, root) pair compatible with an interval value."""
    bits = budget.working_bits
    for _ in range(budget.max_refinements):
        val = value_fn(bits)
        hits = []
        for fc in candidate_polys:
            for box in _isolate_all(fc, bits // 2):
                if _box_intersects_iv(box, val):
                    hits.append((fc, box))
        if len(hits) == 1:
            fc, box = hits[0]
            return AlgebraicNumber(fc, box, _validate=False)
        if not hits:
            raise SplitThueError("no candidate root matches interval value")
        bits *= 2
    raise PrecisionExhausted("could not separate candidate roots")


def _box_intersects_iv(box, val):
    from .precision import is_iv_complex, iv_to_fractions

    if is_iv_complex(val):
        re_lo, re_hi = iv_to_fractions(val.real)
        im_lo, im_hi = iv_to_fractions(val.imag)
    else:
        re_lo, re_hi = iv_to_fractions(val)
        im_lo = im_hi = Fraction(0)
    other = ComplexEnclosure(re_lo, re_hi, im_lo, im_hi)
    if box.is_real:
        return other.intersects(box)
    return box.intersects(other)
