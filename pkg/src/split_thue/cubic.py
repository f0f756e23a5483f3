"""The parametrized cubic X(X - A_n)(X - B_n) - 1: certified real roots and
verification of the root/log approximation bounds with explicit constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .algebraic import poly_eval_sign
from .precision import (
    DEFAULT_BUDGET,
    SplitThueError,
    interval_bits,
    iv_from_fraction,
    iv_from_fractions,
    iv_inf,
    iv_sup,
    iv_width,
)
from .sequences import FamilyInstance, coeff_poly_sub


class AnchorSignFailure(SplitThueError):
    """Predicted sign pattern around an anchor did not materialize; the
    parameter is below the family's validity threshold."""


class BoundViolated(SplitThueError):
    pass


def build_fn(fam: FamilyInstance, n: int):
    """Monic integer cubic X^3 - (A+B)X^2 + ABX - 1 for the given n."""
    A, B = fam.terms(n)
    return cubic_coeffs(A, B)


def cubic_coeffs(A: int, B: int):
    return (1, -(A + B), A * B, -1)


def check_irreducible(coeffs):
    """Rational-root test for a monic integer cubic with constant term -1.

    Returns (irreducible, witness); the witness records A*B = A + B (the
    failing identity) when a rational root exists.
    """
    if len(coeffs) != 4 or coeffs[0] != 1 or coeffs[3] != -1:
        raise ValueError("expected monic integer cubic with constant -1")
    at_one = sum(coeffs)
    at_minus_one = -coeffs[0] + coeffs[1] - coeffs[2] + coeffs[3]
    if at_one == 0 or at_minus_one == 0:
        # at_one == 0 means AB = A + B; at_minus_one == 0 means AB + A + B + 2 = 0
        return False, {"f(1)": at_one, "f(-1)": at_minus_one}
    return True, None


class PolyRootInterval:
    """Rational bracket [lo, hi] with a certified sign change of an integer
    polynomial; refinable by exact bisection."""

    __slots__ = ("coeffs", "lo", "hi", "_sign_lo")

    def __init__(self, coeffs, lo, hi):
        self.coeffs = tuple(int(c) for c in coeffs)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        s_lo = poly_eval_sign(self.coeffs, self.lo)
        s_hi = poly_eval_sign(self.coeffs, self.hi)
        if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
            raise AnchorSignFailure(
                f"no certified sign change on [{float(lo)}, {float(hi)}]"
            )
        self._sign_lo = s_lo

    def width(self):
        return self.hi - self.lo

    def mid(self):
        return (self.lo + self.hi) / 2

    def refine(self, width):
        width = Fraction(width)
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            s = poly_eval_sign(self.coeffs, mid)
            if s == 0:
                # rational root: collapse to it (cannot happen for f_n, which
                # has no rational roots once irreducible)
                self.lo = self.hi = mid
                return self
            if s == self._sign_lo:
                self.lo = mid
            else:
                self.hi = mid
        return self

    def as_iv(self, bits):
        return iv_from_fractions(self.lo, self.hi, bits)

    def overlaps(self, other):
        return self.lo <= other.hi and other.lo <= self.hi


@dataclass
class CubicRootSet:
    """Certified enclosures of the three real roots, labelled by anchors:
    lambda1 near B_n, lambda2 near A_n, lambda3 near 1/(A_n B_n)."""

    n: int
    A: int
    B: int
    coeffs: tuple
    lambda1: PolyRootInterval
    lambda2: PolyRootInterval
    lambda3: PolyRootInterval
    anchor_residuals: tuple = field(default=None)

    def roots(self):
        return (self.lambda1, self.lambda2, self.lambda3)

    def root(self, i):
        return self.roots()[i - 1]

    def refine_all(self, width):
        for r in self.roots():
            r.refine(width)
        return self


def _bracket_around(coeffs, center, halfwidth):
    """Bracket a sign change within [center - w, center + w]."""
    lo, hi = center - halfwidth, center + halfwidth
    s_lo = poly_eval_sign(coeffs, lo)
    s_mid = poly_eval_sign(coeffs, center)
    s_hi = poly_eval_sign(coeffs, hi)
    if s_mid == 0:
        return PolyRootInterval(coeffs, center - halfwidth / 2, center + halfwidth / 2)
    if s_lo != 0 and s_lo != s_mid:
        return PolyRootInterval(coeffs, lo, center)
    if s_hi != 0 and s_hi != s_mid:
        return PolyRootInterval(coeffs, center, hi)
    raise AnchorSignFailure(
        f"no sign change in anchor window around {float(center):.6g}"
    )


def isolate_roots(fam: FamilyInstance, n: int, budget=DEFAULT_BUDGET) -> CubicRootSet:
    """Certify the three real roots from their anchor windows."""
    A, B = fam.terms(n)
    if A == 0 or B == 0 or A * B == A + B:
        raise AnchorSignFailure("degenerate parameters")
    coeffs = cubic_coeffs(A, B)

    l1 = _bracket_around(coeffs, Fraction(B), Fraction(1, abs(B)))
    l2 = _bracket_around(coeffs, Fraction(A), Fraction(1, abs(A)))
    ab = A * B
    l3 = _bracket_around(coeffs, Fraction(1, ab), Fraction(1, ab * ab))

    pairs = [(l1, l2), (l1, l3), (l2, l3)]
    if any(a.overlaps(b) for a, b in pairs):
        raise AnchorSignFailure("anchor windows overlap; n below threshold")

    # widths fine enough for every downstream quantity, incl. lambda2 - A_n
    # whose scale is 1/(A^2 (A-B)^2)
    scale_bits = 2 * (abs(A) * abs(B)).bit_length() + 8
    width = Fraction(1, 2 ** (budget.working_bits // 2 + scale_bits))
    for r in (l1, l2, l3):
        r.refine(width)

    residuals = (
        abs_frac_dist(l1, Fraction(B)),
        abs_frac_dist(l2, Fraction(A)),
        abs_frac_dist(l3, Fraction(1, ab)),
    )
    return CubicRootSet(n, A, B, coeffs, l1, l2, l3, residuals)


def abs_frac_dist(root: PolyRootInterval, point: Fraction):
    """Upper bound on |root - point| from the bracket."""
    return max(abs(root.lo - point), abs(root.hi - point))


# -- residual reports ------------------------------------------------------


@dataclass(frozen=True)
class ResidualEntry:
    name: str
    residual: float
    bound: float
    ok: bool
    ratio: float | None = None  # residual / (n^d2 eps^n) where applicable


@dataclass(frozen=True)
class ResidualReport:
    n: int
    entries: tuple

    @property
    def all_pass(self):
        return all(e.ok for e in self.entries)

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def verify_root_approx(rs: CubicRootSet, fam: FamilyInstance) -> ResidualReport:
    """The four root-location inequalities, checked with exact rationals."""
    A, B = rs.A, rs.B
    checks = [
        ("lambda1-near-B", abs_frac_dist(rs.lambda1, Fraction(B)), Fraction(1, abs(B))),
        ("lambda2-near-A", abs_frac_dist(rs.lambda2, Fraction(A)), Fraction(1, abs(A))),
        (
            "lambda2-second-order",
            abs_frac_dist(rs.lambda2, Fraction(A) + Fraction(1, A * (A - B))),
            Fraction(1, A * A * (A - B) * (A - B)),
        ),
        (
            "lambda3-near-inv-AB",
            abs_frac_dist(rs.lambda3, Fraction(1, A * B)),
            Fraction(1, (A * B) * (A * B)),
        ),
    ]
    entries = tuple(
        ResidualEntry(name, float(res), float(bound), res <= bound)
        for name, res, bound in checks
    )
    return ResidualReport(rs.n, entries)


@dataclass(frozen=True)
class ApproxConstants:
    C: Fraction
    eps: Fraction  # certified upper bound, strictly < 1
    c5: Fraction
    c6: Fraction
    detail: dict = field(default_factory=dict, hash=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.eps < 1):
            raise SplitThueError("eps must lie in [0, 1)")
        if self.c5 > self.c6:
            raise SplitThueError("c5 must not exceed c6")

    def lterm(self, n: int, d2: int) -> Fraction:
        return self.C * Fraction(n) ** d2 * self.eps**n


def _ratio_upper(num, den, bits=128):
    """Rational upper bound on |num/den| for algebraic numbers."""
    with interval_bits(bits):
        q = abs(num.approx(bits)) / abs(den.approx(bits))
        return iv_sup(q)


def compute_constants(fam: FamilyInstance, n_min: int = 2, bits: int = 128) -> ApproxConstants:
    """Effective constants: the shared decay ratio eps, the log-residual
    constant C, and root-difference constants c5 <= c6."""
    alpha, beta = fam.alpha, fam.beta
    ratios = []
    for root, _ in fam.B.secondary:
        ratios.append(("beta_i/beta", _ratio_upper(root, beta, bits)))
    for root, _ in fam.A.secondary:
        ratios.append(("alpha_i/beta", _ratio_upper(root, beta, bits)))
        ratios.append(("alpha_i/alpha", _ratio_upper(root, alpha, bits)))
    if not fam.equal_modulus:
        ratios.append(("alpha/beta", _ratio_upper(alpha, beta, bits)))
    eps = max((r for _, r in ratios), default=Fraction(0))
    if eps >= 1:
        raise SplitThueError("decay ratio not below 1: dominance violated")

    cA, cB = fam.A.dominant_coeff, fam.B.dominant_coeff
    U_cA = cA.abs_coeff_sum_upper(bits)
    U_cB = cB.abs_coeff_sum_upper(bits)
    U_cA_sec = [c.abs_coeff_sum_upper(bits) for _, c in fam.A.secondary]
    U_cB_sec = [c.abs_coeff_sum_upper(bits) for _, c in fam.B.secondary]
    L_cA = cA.abs_lower_inf(n_min, bits)
    L_cB = cB.abs_lower_inf(n_min, bits)

    c1 = max(U_cB_sec, default=Fraction(0)) / L_cB
    c2 = max(U_cA_sec, default=Fraction(0)) / L_cA
    c3 = max([U_cA] + U_cA_sec + U_cB_sec) / L_cB
    if fam.equal_modulus:
        diff_poly = coeff_poly_sub(cB, cA)
        L_diff = diff_poly.abs_lower_inf(n_min, bits)
        U_diff = diff_poly.abs_coeff_sum_upper(bits)
        c4 = max([U_cA] + U_cA_sec + U_cB_sec) / L_diff
    else:
        L_diff = None
        U_diff = None
        c4 = Fraction(0)

    m_A, m_B = len(fam.A.secondary), len(fam.B.secondary)
    C = 5 * max(c1, c2, c3, c4) * (m_B + m_A + 1)

    U_all = U_cB + sum(U_cB_sec, Fraction(0)) + U_cA + sum(U_cA_sec, Fraction(0)) + 1
    c6 = 2 * U_all
    lows = [L_cA, L_cB]
    if fam.equal_modulus:
        lows.append(L_diff)
    c5 = min(lows) / 4

    detail = {
        "ratios": [(name, float(r)) for name, r in ratios],
        "c1": float(c1), "c2": float(c2), "c3": float(c3), "c4": float(c4),
        "U_cA": float(U_cA), "U_cB": float(U_cB),
        "L_cA": float(L_cA), "L_cB": float(L_cB),
        "L_diff": float(L_diff) if L_diff is not None else None,
        "U_diff": float(U_diff) if U_diff is not None else None,
        "n_min": n_min,
    }
    return ApproxConstants(C=C, eps=eps, c5=c5, c6=c6, detail=detail)


def _log_quantities(fam: FamilyInstance, n: int, bits: int):
    """Interval values of log|alpha|, log|beta|, log|c_A(n)|, log|c_B(n)|,
    log|(c_B - c_A)(n)| (the last only in the equal-modulus case)."""
    with interval_bits(bits):
        la = iv.log(abs(fam.alpha.approx(bits)))
        lb = iv.log(abs(fam.beta.approx(bits)))
        lcA = iv.log(abs(fam.A.dominant_coeff.approx_at(n, bits)))
        lcB = iv.log(abs(fam.B.dominant_coeff.approx_at(n, bits)))
        if fam.equal_modulus:
            diff = coeff_poly_sub(fam.B.dominant_coeff, fam.A.dominant_coeff)
            ldiff = iv.log(abs(diff.approx_at(n, bits)))
        else:
            ldiff = None
    return la, lb, lcA, lcB, ldiff


def log_closed_forms(fam: FamilyInstance, n: int, bits: int):
    """The six closed forms for log|lambda_i| and log|lambda_i - A_n|."""
    la, lb, lcA, lcB, ldiff = _log_quantities(fam, n, bits)
    cross = ldiff if fam.equal_modulus else lcB
    return {
        "log|l1|": n * lb + lcB,
        "log|l1-A|": n * lb + cross,
        "log|l2|": n * la + lcA,
        "log|l2-A|": -n * (la + lb) - lcA - cross,
        "log|l3|": -n * (la + lb) - lcA - lcB,
        "log|l3-A|": n * la + lcA,
    }


def _root_log_values(rs: CubicRootSet, bits: int):
    A = rs.A
    with interval_bits(bits):
        out = {}
        for i, name in ((1, "l1"), (2, "l2"), (3, "l3")):
            r = rs.root(i).as_iv(bits)
            out[f"log|{name}|"] = iv.log(abs(r))
            out[f"log|{name}-A|"] = iv.log(abs(r - A))
        return out


def verify_log_approx(
    rs: CubicRootSet, fam: FamilyInstance, consts: ApproxConstants, budget=DEFAULT_BUDGET
) -> ResidualReport:
    """Six log approximations against the shared decaying error term."""
    n = rs.n
    bound = consts.lterm(n, fam.d2)
    scale = Fraction(n) ** fam.d2 * consts.eps**n
    bits = budget.working_bits
    computed = _root_log_values(rs, bits)
    closed = log_closed_forms(fam, n, bits)
    entries = []
    for name in computed:
        with interval_bits(bits):
            resid = abs(computed[name] - closed[name])
        sup = iv_sup(resid)
        ok = sup <= bound
        ratio = float(sup / scale) if scale > 0 else None
        entries.append(ResidualEntry(name, float(sup), float(bound), ok, ratio))
    return ResidualReport(n, tuple(entries))


def verify_root_diff(
    rs: CubicRootSet, fam: FamilyInstance, consts: ApproxConstants, budget=DEFAULT_BUDGET
) -> ResidualReport:
    """The six two-sided root-difference bounds."""
    n = rs.n
    bits = budget.working_bits
    with interval_bits(bits):
        l1 = rs.lambda1.as_iv(bits)
        l2 = rs.lambda2.as_iv(bits)
        l3 = rs.lambda3.as_iv(bits)
        d12 = abs(l1 - l2)
        d13 = abs(l1 - l3)
        d23 = abs(l2 - l3)
        a_abs = abs(fam.alpha.approx(bits))
        b_abs = abs(fam.beta.approx(bits))
        an = a_abs**n
        bn = b_abs**n
        c5 = iv_from_fraction(consts.c5, bits)
        c6 = iv_from_fraction(consts.c6, bits)
        nd1 = iv.mpf(n) ** fam.d1
        nd2 = iv.mpf(n) ** fam.d2
        checks = [
            ("c5 b^n <= |l1-l2|", iv_sup(c5 * bn) <= iv_inf(d12)),
            ("|l1-l2| <= c6 n^d2 b^n", iv_sup(d12) <= iv_inf(c6 * nd2 * bn)),
            ("c5 n^d1 b^n <= |l1-l3|", iv_sup(c5 * nd1 * bn) <= iv_inf(d13)),
            ("|l1-l3| <= c6 n^d2 b^n", iv_sup(d13) <= iv_inf(c6 * nd2 * bn)),
            ("c5 n^d1 a^n <= |l2-l3|", iv_sup(c5 * nd1 * an) <= iv_inf(d23)),
            ("|l2-l3| <= c6 n^d2 a^n", iv_sup(d23) <= iv_inf(c6 * nd2 * an)),
        ]
    entries = tuple(ResidualEntry(name, 0.0, 0.0, ok) for name, ok in checks)
    return ResidualReport(n, entries)


def find_threshold(fam: FamilyInstance, n_max: int, n_min: int = 1, budget=DEFAULT_BUDGET):
    """Smallest n from which all lemma checks pass up to n_max (empirical)."""
    consts = compute_constants(fam)
    status = []
    for n in range(n_min, n_max + 1):
        try:
            rs = isolate_roots(fam, n, budget)
        except AnchorSignFailure:
            status.append(False)
            continue
        ok = (
            verify_root_approx(rs, fam).all_pass
            and verify_log_approx(rs, fam, consts, budget).all_pass
            and verify_root_diff(rs, fam, consts, budget).all_pass
        )
        status.append(ok)
    first = None
    for i in range(len(status) - 1, -1, -1):
        if not status[i]:
            break
        first = n_min + i
    return first, status
