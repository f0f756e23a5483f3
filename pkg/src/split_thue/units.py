"""Unit lattice of the cubic order: regulator, decomposition of solutions
into fundamental units, Siegel-identity linear forms and their transformed
coefficient tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .cubic import CubicRootSet, log_closed_forms, _log_quantities
from .precision import (
    DEFAULT_BUDGET,
    SplitThueError,
    compare,
    interval_bits,
    iv_from_fraction,
    iv_inf,
    iv_sup,
    iv_width,
)
from .sequences import FamilyInstance


class NotAUnit(SplitThueError):
    """The pair (x, y) does not satisfy the norm-form equation."""


class RoundingAmbiguous(SplitThueError):
    """The solved exponents are too far from integers to accept."""


# fixed (k, l) companion indices for each solution type j
KL_CONVENTION = {1: (3, 2), 2: (3, 1), 3: (2, 1)}


def _unit_log_matrix(rs: CubicRootSet, pair, shift, bits):
    """Rows (log|lambda_i|, log|lambda_i - shift|) for i in pair."""
    rows = []
    with interval_bits(bits):
        for i in pair:
            r = rs.root(i).as_iv(bits)
            rows.append((iv.log(abs(r)), iv.log(abs(r - shift))))
    return rows


def regulator(rs: CubicRootSet, pair=(1, 2), bits=None, shift=None):
    """|det| of the 2x2 log-embedding matrix of the fundamental units
    {lambda, lambda - A_n}; independent of the chosen pair of embeddings."""
    if pair[0] == pair[1]:
        raise ValueError("need two distinct embeddings")
    bits = bits or DEFAULT_BUDGET.working_bits
    shift = shift if shift is not None else rs.A
    (a, b), (c, d) = _unit_log_matrix(rs, pair, shift, bits)
    with interval_bits(bits):
        return abs(a * d - b * c)


@dataclass(frozen=True)
class RegulatorGrowthReport:
    samples: tuple  # (n, R midpoint float)
    limit: float  # log|beta| (2 log|alpha| + log|beta|)
    rel_dev_at_top: float
    pair_independent: bool
    passed: bool


def verify_regulator_growth(
    fam: FamilyInstance, n_lo: int, n_hi: int, tol_fit=0.1, samples=9, budget=DEFAULT_BUDGET
) -> RegulatorGrowthReport:
    """R(n)/n^2 against its closed-form limit; also cross-checks that the
    regulator does not depend on which embedding pair is used."""
    from .cubic import isolate_roots

    bits = budget.working_bits
    ns = sorted({n_lo + round(i * (n_hi - n_lo) / (samples - 1)) for i in range(samples)})
    with interval_bits(bits):
        la = iv.log(abs(fam.alpha.approx(bits)))
        lb = iv.log(abs(fam.beta.approx(bits)))
        limit = lb * (2 * la + lb)
    limit_mid = float((iv_inf(limit) + iv_sup(limit)) / 2)

    vals = []
    pair_ok = True
    for n in ns:
        rs = isolate_roots(fam, n, budget)
        # resolving lambda2 - A_n (scale 1/(A(A-B))^2) next to lambda2 (scale
        # A) needs mantissas that grow with the coefficients
        nbits = bits + 3 * (abs(rs.A) * abs(rs.B)).bit_length()
        r12 = regulator(rs, (1, 2), nbits)
        r23 = regulator(rs, (2, 3), nbits)
        r13 = regulator(rs, (1, 3), nbits)
        widths = iv_width(r12) + iv_width(r23) + iv_width(r13)
        if abs(iv_sup(r12) - iv_inf(r23)) > 2 * widths and abs(
            iv_sup(r23) - iv_inf(r12)
        ) > 2 * widths:
            pair_ok = False
        if abs(iv_sup(r12) - iv_inf(r13)) > 2 * widths and abs(
            iv_sup(r13) - iv_inf(r12)
        ) > 2 * widths:
            pair_ok = False
        mid = float((iv_inf(r12) + iv_sup(r12)) / 2)
        vals.append((n, mid))

    top_n, top_r = vals[-1]
    rel_dev = abs(top_r / top_n**2 - limit_mid) / abs(limit_mid)
    return RegulatorGrowthReport(
        samples=tuple(vals),
        limit=limit_mid,
        rel_dev_at_top=rel_dev,
        pair_independent=pair_ok,
        passed=(rel_dev <= tol_fit and pair_ok),
    )


@dataclass(frozen=True)
class UnitExponents:
    b1: int
    b2: int
    sign: int
    residual: float
    alt_units: bool = False

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +-1")
        if not self.residual < 0.5:
            raise ValueError("residual must be < 1/2")


def norm_form(x, y, A, B):
    return x * (x - A * y) * (x - B * y) - y**3


def unit_decompose(
    x: int, y: int, rs: CubicRootSet, budget=DEFAULT_BUDGET, alt_units=False
) -> UnitExponents:
    """Integer exponents (b1, b2) and sign with x - lambda_i y =
    sign * lambda_i^b1 (lambda_i - A_n)^b2 across all embeddings.

    With ``alt_units`` the second fundamental unit is lambda_i - B_n instead.
    """
    A, B = rs.A, rs.B
    nf = norm_form(x, y, A, B)
    if nf not in (1, -1):
        raise NotAUnit(f"norm form value {nf} is not a unit")
    shift = B if alt_units else A
    bits = budget.working_bits
    with interval_bits(bits):
        u = [rs.root(i).as_iv(bits) * (-y) + x for i in (1, 2, 3)]
        rows = _unit_log_matrix(rs, (1, 2), shift, bits)
        (m11, m12), (m21, m22) = rows
        det = m11 * m22 - m12 * m21
        r1, r2 = iv.log(abs(u[0])), iv.log(abs(u[1]))
        b1_iv = (r1 * m22 - r2 * m12) / det
        b2_iv = (m11 * r2 - m21 * r1) / det

    def mid(v):
        return (iv_inf(v) + iv_sup(v)) / 2

    b1 = round(mid(b1_iv))
    b2 = round(mid(b2_iv))
    residual = max(abs(mid(b1_iv) - b1), abs(mid(b2_iv) - b2))
    residual += float(iv_width(b1_iv) + iv_width(b2_iv))
    if residual >= 0.25:
        raise RoundingAmbiguous(
            f"solved exponents ({float(mid(b1_iv)):.4f}, {float(mid(b2_iv)):.4f})"
            " too far from integers"
        )

    # multiplicative re-verification against all three embeddings
    rel_tol = Fraction(1, 2 ** (bits // 4))
    sign = 0
    with interval_bits(bits):
        for i in (1, 2, 3):
            r = rs.root(i).as_iv(bits)
            t = r**b1 * (r - shift) ** b2
            q = u[i - 1] / t
            if iv_sup(abs(abs(q) - 1)) > rel_tol:
                raise RoundingAmbiguous(
                    f"recomposition mismatch at embedding {i}"
                )
            s = 1 if iv_inf(q) > 0 else (-1 if iv_sup(q) < 0 else 0)
            if s == 0:
                raise RoundingAmbiguous("sign of recomposition quotient undecided")
            if sign == 0:
                sign = s
            elif sign != s:
                raise RoundingAmbiguous("inconsistent sign across embeddings")
    return UnitExponents(b1, b2, sign, residual, alt_units)


def solution_type(x: int, y: int, rs: CubicRootSet, budget=DEFAULT_BUDGET) -> int:
    """Index j minimizing |x - lambda_j y|; ties resolved to the smallest j."""
    if y == 0:
        return 1
    bits = budget.working_bits
    with interval_bits(bits):
        mags = [abs(rs.root(i).as_iv(bits) * (-y) + x) for i in (1, 2, 3)]
    best = 1
    for i in (2, 3):
        verdict = compare(mags[i - 1], mags[best - 1])
        if verdict is True:
            best = i
        # undecided counts as a tie and keeps the smaller index
    return best


def siegel_gamma(x: int, y: int, rs: CubicRootSet, j: int, budget=DEFAULT_BUDGET):
    """gamma from Siegel's identity for type j, and Lambda = log|1 + gamma|."""
    k, l = KL_CONVENTION[j]
    bits = budget.working_bits
    with interval_bits(bits):
        lam = {i: rs.root(i).as_iv(bits) for i in (1, 2, 3)}
        uj = x - lam[j] * y
        uk = x - lam[k] * y
        if iv_inf(uk) <= 0 <= iv_sup(uk):
            raise ZeroDivisionError("x - lambda_k y encloses zero")
        gamma = (uj / uk) * ((lam[l] - lam[k]) / (lam[j] - lam[l]))
        lam_form = iv.log(abs(1 + gamma))
    return gamma, lam_form


def siegel_residual(x: int, y: int, rs: CubicRootSet, budget=DEFAULT_BUDGET):
    """The cyclic three-term sum; an interval that must enclose zero."""
    bits = budget.working_bits
    with interval_bits(bits):
        l1, l2, l3 = (rs.root(i).as_iv(bits) for i in (1, 2, 3))
        u1, u2, u3 = (x - l * y for l in (l1, l2, l3))
        return u1 * (l2 - l3) + u3 * (l1 - l2) + u2 * (l3 - l1)


# -- transformed linear form xi_j ------------------------------------------

XI_LABELS = ("log|alpha|", "log|beta|", "log|cA|", "log|cB|", "log|cB-cA|")


@dataclass(frozen=True)
class LinearFormXi:
    j: int
    case_tag: str  # "strict" | "equal_modulus"
    n: int
    b1: int
    b2: int
    terms: tuple  # of (label, integer coefficient)
    flags: tuple = ()

    def coefficient(self, label):
        for lab, c in self.terms:
            if lab == label:
                return c
        raise KeyError(label)

    @property
    def nonzero_terms(self):
        return tuple((lab, c) for lab, c in self.terms if c != 0)


def xi_form(j: int, case_tag: str, n: int, b1: int, b2: int) -> LinearFormXi:
    """Coefficient table of the transformed linear form for solution type j."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    if case_tag not in ("strict", "equal_modulus"):
        raise ValueError("unknown case tag")
    ne = 1 if case_tag == "strict" else 0  # chi_{|alpha| != |beta|}
    eq = 1 - ne
    flags = []
    if j == 1:
        coeffs = (
            2 * n * (b1 - b2),
            n * (b1 - b2),
            2 * (b1 - b2),
            b1 - ne * b2 + eq,
            eq * (b2 + 1),
        )
    elif j == 2:
        coeffs = (
            n * (b1 - (b2 - 1)),
            n * (2 * b1 + b2 - 1),
            b1 - (b2 - 1),
            2 * b1 + ne * (b2 - 1),
            eq * (b2 - 1),
        )
    else:
        # the published log|cB| row is ambiguous and drops a b1 term; the
        # row below is re-derived from the log closed forms (it makes the
        # form vanish on the trivial solution (0,1) as required)
        coeffs = (
            n * (b2 - (b1 - 1)),
            n * (2 * b2 + b1 - 1),
            b2 - (b1 - 1),
            b1 + ne * (2 * b2) - 1,
            eq * 2 * b2,
        )
        flags.append("j3-cB-row-rederived-as-b1-plus-chi-2b2-minus-1")
    return LinearFormXi(j, case_tag, n, b1, b2, tuple(zip(XI_LABELS, coeffs)), tuple(flags))


def xi_value(xi: LinearFormXi, fam: FamilyInstance, bits=None):
    """Interval value of the linear form."""
    bits = bits or DEFAULT_BUDGET.working_bits
    la, lb, lcA, lcB, ldiff = _log_quantities(fam, xi.n, bits)
    logs = {
        "log|alpha|": la,
        "log|beta|": lb,
        "log|cA|": lcA,
        "log|cB|": lcB,
        "log|cB-cA|": ldiff,
    }
    with interval_bits(bits):
        total = iv.mpf(0)
        for label, coeff in xi.terms:
            if coeff == 0:
                continue
            if logs[label] is None:
                raise SplitThueError(f"{label} term in a strict-case form")
            total += coeff * logs[label]
    return total


def xi_upper_rhs(fam: FamilyInstance, consts, n: int, bits=None) -> Fraction:
    """Right-hand side of the transformed-form upper bound.

    The source states the first term with c5 cubed; the derivation uses the
    *inverse* of the root-difference lower bounds, so we evaluate 4 c5^{-3}
    and flag the discrepancy in reports.
    """
    bits = bits or DEFAULT_BUDGET.working_bits
    with interval_bits(bits):
        a_abs = abs(fam.alpha.approx(bits))
        b_abs = abs(fam.beta.approx(bits))
        c5 = iv_from_fraction(consts.c5, bits)
        C = iv_from_fraction(consts.C, bits)
        eps = iv_from_fraction(consts.eps, bits)
        t1 = (
            4
            / c5**3
            * iv.mpf(n) ** (-fam.d1)
            * a_abs ** (-2 * n)
            * b_abs ** (-n)
        )
        t2 = 6 * C * iv.mpf(n) ** fam.d2 * eps**n
        return iv_sup(t1 + t2)


@dataclass(frozen=True)
class XiBoundReport:
    j: int
    n: int
    value: float
    bound: float
    ok: bool
    flags: tuple


def verify_xi_bound(
    xi: LinearFormXi, fam: FamilyInstance, consts, n: int, from_solution=True
) -> XiBoundReport:
    """Check |xi_j| against its decaying upper bound."""
    if not from_solution:
        raise ValueError("xi bound only applies to exponents of genuine solutions")
    if n != xi.n:
        raise ValueError("n mismatch")
    value = xi_value(xi, fam)
    rhs = xi_upper_rhs(fam, consts, n)
    sup = iv_sup(abs(value))
    flags = xi.flags + ("c5-inverted-in-upper-bound",)
    return XiBoundReport(xi.j, n, float(sup), float(rhs), sup <= rhs, flags)


def exponent_closed_forms(fam: FamilyInstance, n: int, j: int, logy, bits=None):
    """Closed-form (R b1, R b2) from the inverted log system, with every
    logarithm replaced by its decaying-error approximation.

    ``logy`` may be a number or an interval for log|y|.
    """
    bits = bits or DEFAULT_BUDGET.working_bits
    k, l = KL_CONVENTION[j]
    closed = log_closed_forms(fam, n, bits)
    la, lb, lcA, lcB, ldiff = _log_quantities(fam, n, bits)
    cross = ldiff if fam.equal_modulus else lcB
    logdiff = {
        frozenset((1, 2)): n * lb + cross,
        frozenset((1, 3)): n * lb + lcB,
        frozenset((2, 3)): n * la + lcA,
    }
    with interval_bits(bits):
        lam = {i: closed[f"log|l{i}|"] for i in (1, 2, 3)}
        lamA = {i: closed[f"log|l{i}-A|"] for i in (1, 2, 3)}
        dk = logy + logdiff[frozenset((j, k))]
        dl = logy + logdiff[frozenset((j, l))]
        Rb1 = lamA[l] * dk - lamA[k] * dl
        Rb2 = -lam[l] * dk + lam[k] * dl
    return Rb1, Rb2
