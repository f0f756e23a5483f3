"""Linear-recurrent integer sequences with a strictly dominant real root.

A sequence is evaluated two ways: exactly by its integer recursion, and via
the explicit formula  a_n = c(n) r^n + sum_i c_i(n) r_i^n  with certified
interval arithmetic; the two must agree on every term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy as sp
from mpmath import iv

from .algebraic import AlgebraicNumber, _isolate_all, _normalize_coeffs
from .precision import (
    DEFAULT_BUDGET,
    SplitThueError,
    certified_lt,
    interval_bits,
    is_iv_complex,
    iv_from_fraction,
    iv_inf,
    iv_sup,
    iv_width,
)

_X = sp.Symbol("x")


class InconsistentModel(SplitThueError):
    """Recursion and explicit formula disagree on a term."""


class HypothesisViolated(SplitThueError):
    def __init__(self, message, witness_n=None):
        super().__init__(message)
        self.witness_n = witness_n


@dataclass(frozen=True)
class CoefficientPolynomial:
    """Polynomial in n with algebraic coefficients, attached to one root."""

    coeffs: tuple  # AlgebraicNumber, ascending powers of n

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("empty coefficient polynomial")

    @property
    def degree(self):
        d = 0
        for j, c in enumerate(self.coeffs):
            if not c.is_zero:
                d = j
        return d

    def value_at(self, n):
        """Exact value c(n) as an AlgebraicNumber (Horner over field_arith)."""
        acc = AlgebraicNumber.from_rational(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def approx_at(self, n, bits):
        """Interval value of c(n); iv context must already be set."""
        acc = iv.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c.approx(bits)
        return acc

    def abs_coeff_sum_upper(self, bits=64):
        """Rational upper bound on sum of |coefficients|."""
        with interval_bits(bits):
            total = iv.mpf(0)
            for c in self.coeffs:
                total += abs(c.approx(bits))
            return iv_sup(total)

    def abs_lower_inf(self, n_min=2, bits=128):
        """Certified positive lower bound on inf_{n >= n_min} |c(n)|.

        Beyond the point where the leading term dominates, |c(n)| increases;
        the finite prefix is checked term by term.
        """
        g = self.degree
        with interval_bits(bits):
            lead = abs(self.coeffs[g].approx(bits))
            if iv_inf(lead) <= 0:
                raise SplitThueError("leading coefficient not separated from 0")
            rest = iv.mpf(0)
            for c in self.coeffs[:g]:
                rest += abs(c.approx(bits))
            if g == 0:
                return iv_inf(lead)
            # |c(n)| >= n^(g-1) (|lead| n - rest), increasing for n > rest/|lead|
            n_star = max(n_min, 1 + math.ceil(2 * float(iv_sup(rest)) / float(iv_inf(lead))))
            best = None
            for n in range(n_min, n_star + 1):
                val = abs(self.approx_at(n, bits))
                lo = iv_inf(val)
                if lo <= 0:
                    raise SplitThueError(
                        f"coefficient polynomial not separated from 0 at n={n}"
                    )
                best = lo if best is None else min(best, lo)
            tail = iv_inf(lead) * n_star - iv_sup(rest)
            tail_lo = Fraction(n_star) ** (g - 1) * tail
            return min(best, tail_lo)


def coeff_poly_sub(a: CoefficientPolynomial, b: CoefficientPolynomial):
    """Coefficient-wise difference a - b."""
    la, lb = len(a.coeffs), len(b.coeffs)
    zero = AlgebraicNumber.from_rational(0)
    out = []
    for j in range(max(la, lb)):
        ca = a.coeffs[j] if j < la else zero
        cb = b.coeffs[j] if j < lb else zero
        out.append(ca - cb)
    return CoefficientPolynomial(tuple(out))


@dataclass(frozen=True)
class RecurrentSequence:
    dominant_root: AlgebraicNumber
    dominant_coeff: CoefficientPolynomial
    secondary: tuple  # of (root: AlgebraicNumber, coeff: CoefficientPolynomial)
    recurrence_coeffs: tuple  # characteristic polynomial, descending, monic
    initial_terms: tuple

    def __post_init__(self):
        if not self.dominant_root.is_real:
            raise HypothesisViolated("dominant root must be real")
        order = len(self.recurrence_coeffs) - 1
        if len(self.initial_terms) != order:
            raise ValueError("initial_terms must match recurrence order")
        if self.recurrence_coeffs[0] != 1:
            raise ValueError("characteristic polynomial must be monic")
        self._check_dominance()
        self._check_explicit_consistency()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_recurrence(cls, recurrence_coeffs, initial_terms):
        """Factor the characteristic polynomial and solve for the explicit
        formula's coefficient polynomials."""
        recurrence_coeffs = tuple(int(c) for c in recurrence_coeffs)
        initial_terms = tuple(int(a) for a in initial_terms)
        order = len(recurrence_coeffs) - 1
        if order < 1:
            raise ValueError("recurrence must have positive order")
        poly = sp.Poly(list(recurrence_coeffs), _X)
        if poly.LC() != 1:
            raise ValueError("characteristic polynomial must be monic")
        roots_sym = []  # (sympy root, multiplicity, factor coeffs)
        for fac, mult in poly.factor_list()[1]:
            fc = _normalize_coeffs(fac.all_coeffs())
            if len(fc) < 2:
                continue
            for idx in range(len(fc) - 1):
                roots_sym.append((sp.CRootOf(sp.Poly(list(fc), _X), idx), mult, fc))
        if sum(m for _, m, _ in roots_sym) != order:
            raise ValueError("characteristic polynomial must not have zero root of deficient factorization")
        # linear system for the coefficient polynomials
        unknown_index = []
        for k, (_, mult, _) in enumerate(roots_sym):
            for j in range(mult):
                unknown_index.append((k, j))
        rows = []
        for n in range(order):
            row = []
            for k, j in unknown_index:
                r = roots_sym[k][0]
                row.append(sp.Integer(n) ** j * r**n)
            rows.append(row)
        sol = sp.Matrix(rows).LUsolve(sp.Matrix(list(initial_terms)))
        values = [sp.simplify(v) for v in sol]

        per_root = {}
        for (k, j), v in zip(unknown_index, values):
            per_root.setdefault(k, {})[j] = v
        entries = []
        for k, (r_sym, mult, fc) in enumerate(roots_sym):
            root = _algebraic_from_crootof(fc, r_sym)
            coeffs = tuple(
                _algebraic_from_sympy_value(per_root[k].get(j, sp.Integer(0)))
                for j in range(mult)
            )
            entries.append((root, CoefficientPolynomial(coeffs)))

        dom_idx = _dominant_index(entries)
        dominant_root, dominant_coeff = entries[dom_idx]
        secondary = tuple(e for i, e in enumerate(entries) if i != dom_idx)
        return cls(dominant_root, dominant_coeff, secondary, recurrence_coeffs, initial_terms)

    # -- evaluation --------------------------------------------------------

    @property
    def order(self):
        return len(self.recurrence_coeffs) - 1

    def eval_recursion(self, n):
        if n < 0:
            raise ValueError("n must be >= 0")
        terms = list(self.initial_terms)
        if n < len(terms):
            return terms[n]
        tail = self.recurrence_coeffs[1:]
        for _ in range(n - len(terms) + 1):
            nxt = -sum(c * t for c, t in zip(tail, reversed(terms)))
            terms.append(nxt)
            terms = terms[1:]
        return terms[-1]

    def explicit_iv(self, n, bits=None):
        """Interval value of the explicit formula at n (real part; the
        imaginary part of the conjugate-pair sum is checked to straddle 0)."""
        if bits is None:
            bits = self._formula_bits(n)
        with interval_bits(bits):
            total = iv.mpf(0)
            imag = iv.mpf(0)
            for root, coeff in [(self.dominant_root, self.dominant_coeff)] + list(self.secondary):
                rv = root.approx(bits)
                cv = coeff.approx_at(n, bits)
                term = cv * rv**n
                if is_iv_complex(term):
                    total += term.real
                    imag += term.imag
                else:
                    total += term
            if not (iv_inf(imag) <= 0 <= iv_sup(imag)):
                raise InconsistentModel("imaginary part of explicit formula off zero")
            return total

    def eval_exact(self, n):
        """n-th term by recursion, cross-checked against the explicit formula."""
        value = self.eval_recursion(n)
        enc = self.explicit_iv(n)
        if iv_width(enc) >= Fraction(1, 2):
            enc = self.explicit_iv(n, bits=2 * self._formula_bits(n))
            if iv_width(enc) >= Fraction(1, 2):
                raise InconsistentModel("explicit formula enclosure too wide")
        if not (iv_inf(enc) <= value <= iv_sup(enc)):
            raise InconsistentModel(
                f"explicit formula excludes recursion value at n={n}"
            )
        return value

    def _formula_bits(self, n):
        mag = 1.0
        for root, _ in [(self.dominant_root, self.dominant_coeff)] + list(self.secondary):
            box = root.enclosure
            if box.is_real:
                mag = max(mag, abs(float(box.lo)), abs(float(box.hi)))
            else:
                mag = max(mag, abs(float(box.re_lo)) + abs(float(box.im_hi)))
        return 96 + int((n + self.order) * math.log2(mag + 1)) + 8 * self.order

    # -- internal checks ---------------------------------------------------

    def _check_dominance(self):
        dom = self.dominant_root
        for root, _ in self.secondary:
            if not _certified_modulus_less(root, dom):
                raise HypothesisViolated("dominant root condition fails")

    def _check_explicit_consistency(self):
        for n in range(self.order):
            enc = self.explicit_iv(n)
            if not (iv_inf(enc) <= self.initial_terms[n] <= iv_sup(enc)):
                raise InconsistentModel(
                    f"explicit formula does not reproduce initial term {n}"
                )

    # -- family helpers ----------------------------------------------------

    def coeff_value(self, which, n):
        """Coefficient polynomial of the selected root evaluated at n.

        ``which`` = -1 selects the dominant root, 0.. an index into secondary.
        """
        if which == -1:
            return self.dominant_coeff.value_at(n)
        return self.secondary[which][1].value_at(n)


def _dominant_index(entries):
    """Index of the entry whose root strictly dominates in modulus."""
    best = 0
    for i in range(1, len(entries)):
        if _certified_modulus_less(entries[best][0], entries[i][0]):
            best = i
    # best must dominate every other entry; verified again by the caller
    return best


def _certified_modulus_less(a: AlgebraicNumber, b: AlgebraicNumber, budget=DEFAULT_BUDGET):
    """Certified |a| < |b| (False also covers undecidable-at-budget ties)."""
    def refine(bits):
        with interval_bits(bits):
            return abs(a.approx(bits)), abs(b.approx(bits))

    with interval_bits(budget.working_bits):
        x, y = abs(a.approx(budget.working_bits)), abs(b.approx(budget.working_bits))
    try:
        return certified_lt(x, y, refine, budget)
    except SplitThueError:
        return False


def _algebraic_from_crootof(factor_coeffs, r_sym):
    val = r_sym.evalf(60)
    re = Fraction(str(sp.re(val)))
    im = Fraction(str(sp.im(val)))
    slack = Fraction(1, 2**40)
    for eps_bits in (64, 128, 256, 512):
        boxes = _isolate_all(tuple(factor_coeffs), eps_bits)
        hits = []
        for b in boxes:
            if b.is_real:
                if abs(im) <= slack and b.lo - slack <= re <= b.hi + slack:
                    hits.append(b)
            elif (
                b.re_lo - slack <= re <= b.re_hi + slack
                and b.im_lo - slack <= im <= b.im_hi + slack
            ):
                hits.append(b)
        if len(hits) == 1:
            return AlgebraicNumber(factor_coeffs, hits[0], _validate=False)
        slack /= 2**16
    raise SplitThueError("could not match characteristic root to enclosure")


def _algebraic_from_sympy_value(expr):
    if expr.is_Rational:
        return AlgebraicNumber.from_rational(Fraction(int(expr.p), int(expr.q)))
    return AlgebraicNumber.from_sympy(expr)


# -- family ----------------------------------------------------------------


@dataclass(frozen=True)
class FamilyInstance:
    A: RecurrentSequence
    B: RecurrentSequence
    d1: int
    d2: int
    equal_modulus: bool

    @classmethod
    def build(cls, A, B, budget=DEFAULT_BUDGET):
        """Order the pair so |alpha| <= |beta| and classify the case."""
        alpha, beta = A.dominant_root, B.dominant_root
        equal = _modulus_equal(alpha, beta)
        if not equal and not _certified_modulus_less(alpha, beta, budget):
            A, B = B, A
        degrees = [A.dominant_coeff.degree, B.dominant_coeff.degree]
        degrees += [c.degree for _, c in A.secondary]
        degrees += [c.degree for _, c in B.secondary]
        return cls(A, B, min(degrees), max(degrees), equal)

    @property
    def alpha(self):
        return self.A.dominant_root

    @property
    def beta(self):
        return self.B.dominant_root

    @property
    def case_tag(self):
        return "equal_modulus" if self.equal_modulus else "strict"

    def terms(self, n):
        return self.A.eval_exact(n), self.B.eval_exact(n)

    def c_A(self, n):
        return self.A.dominant_coeff.value_at(n)

    def c_B(self, n):
        return self.B.dominant_coeff.value_at(n)

    def c_diff(self, n):
        """(c_B - c_A)(n)."""
        return coeff_poly_sub(self.B.dominant_coeff, self.A.dominant_coeff).value_at(n)


def _modulus_equal(a: AlgebraicNumber, b: AlgebraicNumber):
    """Exact |a| = |b| for real algebraic numbers: a = b or a = -b."""
    return a == b or a == -b


# -- hypothesis checking ---------------------------------------------------


@dataclass(frozen=True)
class HypothesisReport:
    case: str
    passed: bool
    first_n_all_pass: int | None
    bullet: str | None  # which sign regime holds from first_n on
    equal_case_condition: str | None
    failures: tuple  # of (n, reason)


def check_hypotheses(fam: FamilyInstance, n_probe: int, budget=DEFAULT_BUDGET) -> HypothesisReport:
    """Check the family's sign-regime conditions for n = 1..n_probe."""
    beta = fam.beta
    if not _certified_modulus_greater_than_one(beta, budget):
        raise HypothesisViolated("|beta| must exceed 1")

    failures = []
    per_n_ok = []
    bullet_seen = None
    equal_cond = None
    for n in range(1, n_probe + 1):
        An, Bn = fam.terms(n)
        ok, reason, bullet = _bullet_check(An, Bn)
        if ok and fam.equal_modulus:
            ok, reason, equal_cond = _equal_modulus_check(fam, n, budget)
        per_n_ok.append(ok)
        if ok:
            bullet_seen = bullet
        else:
            failures.append((n, reason))

    first = None
    for i in range(len(per_n_ok) - 1, -1, -1):
        if not per_n_ok[i]:
            break
        first = i + 1
    passed = first is not None
    return HypothesisReport(
        case=fam.case_tag,
        passed=passed,
        first_n_all_pass=first,
        bullet=bullet_seen if passed else None,
        equal_case_condition=equal_cond,
        failures=tuple(failures),
    )


def check_hypotheses_at(fam: FamilyInstance, n: int, budget=DEFAULT_BUDGET):
    """Single-n version: (ok, reasons) for the bullet conditions at n."""
    An, Bn = fam.terms(n)
    ok, reason, _ = _bullet_check(An, Bn)
    if ok and fam.equal_modulus:
        ok, reason, _ = _equal_modulus_check(fam, n, budget)
    return ok, (() if ok else ((n, reason),))


def _bullet_check(An, Bn):
    if 1 <= An <= Bn - 2:
        return True, None, "positive"
    if -1 >= An >= Bn + 3:
        return True, None, "negative"
    return False, f"A_n={An}, B_n={Bn} outside both bullet ranges", None


def _equal_modulus_check(fam, n, budget):
    """Extra conditions in the equal-modulus case, decided exactly."""
    cB = fam.c_B(n)
    cA = fam.c_A(n)
    diff = cB - cA
    one = AlgebraicNumber.from_rational(1)
    if _abs_equal(cB, cA):
        return False, f"|c_B(n)| = |c_A(n)| at n={n}", None
    if _abs_equal(cB, one):
        if diff.is_zero or _abs_equal(diff, one):
            return False, f"|c_B-c_A| in {{0,1}} at n={n}", None
        return True, None, "unit-modulus"
    cB_gt_1 = not _certified_abs_le(cB, 1, budget)
    if cB_gt_1:
        # need |c_B - c_A| > 1/|c_B|, i.e. (|c_B-c_A| |c_B|)^2 > 1
        prod = abs_square(diff * cB)
        if prod == one:
            return False, f"|c_B - c_A| = 1/|c_B| at n={n}", None
        if _certified_gt_one(prod, budget):
            return True, None, "large-cB"
        return False, f"|c_B - c_A| <= 1/|c_B| at n={n}", None
    # 0 < |c_B| < 1 case: need 0 < |c_B - c_A| < 1
    if diff.is_zero:
        return False, f"c_B = c_A at n={n}", None
    if _abs_equal(diff, one):
        return False, f"|c_B - c_A| = 1 at n={n}", None
    if _certified_abs_le(diff, 1, budget):
        return True, None, "small-cB"
    return False, f"|c_B - c_A| > 1 at n={n}", None


def abs_square(x: AlgebraicNumber):
    return x * x


def _abs_equal(x: AlgebraicNumber, y: AlgebraicNumber):
    return x == y or x == -y


def _certified_abs_le(x: AlgebraicNumber, bound, budget):
    """Certified |x| < bound (call only after excluding equality exactly)."""
    def refine(bits):
        with interval_bits(bits):
            return abs(x.approx(bits)), iv_from_fraction(Fraction(bound), bits)

    a, b = refine(budget.working_bits)
    return certified_lt(a, b, refine, budget)


def _certified_gt_one(x: AlgebraicNumber, budget):
    def refine(bits):
        with interval_bits(bits):
            return iv_from_fraction(1, bits), abs(x.approx(bits))

    a, b = refine(budget.working_bits)
    return certified_lt(a, b, refine, budget)


def _certified_modulus_greater_than_one(x: AlgebraicNumber, budget):
    if x == AlgebraicNumber.from_rational(1) or x == AlgebraicNumber.from_rational(-1):
        return False
    return _certified_gt_one(x, budget)


# -- JSON interface --------------------------------------------------------


def sequence_from_json(data: dict) -> RecurrentSequence:
    """Build a sequence from the documented JSON schema.

    { "recurrence": [int...], "initial": [int...],
      optional "roots": [ { "minpoly": [int...], "enclosure": [lo, hi],
                            "coeff_poly": [literal...] } ... ] }

    The first root entry is the dominant one.  An algebraic literal is a
    rational (int, float-free string "p/q") or an object with "minpoly" and
    "enclosure".
    """
    recurrence = [int(c) for c in data["recurrence"]]
    initial = [int(a) for a in data["initial"]]
    if "roots" not in data or not data["roots"]:
        return RecurrentSequence.from_recurrence(recurrence, initial)
    entries = []
    for spec in data["roots"]:
        root = _algebraic_from_json(spec)
        coeffs = tuple(_literal_from_json(lit) for lit in spec.get("coeff_poly", [1]))
        entries.append((root, CoefficientPolynomial(coeffs)))
    dominant_root, dominant_coeff = entries[0]
    return RecurrentSequence(
        dominant_root,
        dominant_coeff,
        tuple(entries[1:]),
        tuple(recurrence),
        tuple(initial),
    )


def _parse_rational(value):
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    raise ValueError(f"rationals must be ints or 'p/q' strings, got {value!r}")


def _algebraic_from_json(spec):
    minpoly = [int(c) for c in spec["minpoly"]]
    lo, hi = (_parse_rational(v) for v in spec["enclosure"])
    if len(minpoly) == 2:
        return AlgebraicNumber.from_rational(Fraction(-minpoly[1], minpoly[0]))
    return AlgebraicNumber.from_real_root(minpoly, (lo + hi) / 2)


def _literal_from_json(lit):
    if isinstance(lit, dict):
        return _algebraic_from_json(lit)
    return AlgebraicNumber.from_rational(_parse_rational(lit))
