"""Effective bounds: the Thue-equation solution-size upper bound, the
linear-forms-in-logarithms lower bound, and their intersection into a
concrete parameter threshold n0.

Everything here is evaluated in closed form (logarithms of the recurrence
data), never by isolating roots at the probed n -- the crossing points lie
far beyond any n at which exact root isolation is feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv

from .algebraic import AlgebraicNumber, field_arith
from .precision import (
    DEFAULT_BUDGET,
    SplitThueError,
    interval_bits,
    iv_from_fraction,
    iv_from_fractions,
    iv_inf,
    iv_sup,
)
from .sequences import CoefficientPolynomial, FamilyInstance, coeff_poly_sub


class NoCrossing(SplitThueError):
    """No contradiction point was found below the configured cap."""


# -- solution-size upper bound (unit rank 2, cubic form) -------------------

def bugy_constant(r: int = 2, N: int = 3) -> int:
    """C(r, N) = 3^(r+27) (r+1)^(7r+19) N^(2N+6r+14), exactly."""
    return 3 ** (r + 27) * (r + 1) ** (7 * r + 19) * N ** (2 * N + 6 * r + 14)


C_RANK2_CUBIC = bugy_constant(2, 3)  # == 3**94


def bugy_bound(R_upper: Fraction, logH_upper: Fraction, bits: int = 192) -> Fraction:
    """Upper bound C * R * max(log R, 1) * (R + log(H e)) on
    max(log|x|, log|y|); the right-hand side m = +-1 makes B = e."""
    if R_upper <= 0:
        raise ValueError("regulator bound must be positive")
    with interval_bits(bits):
        log_R = iv_sup(iv.log(iv_from_fraction(R_upper, bits)))
    return C_RANK2_CUBIC * R_upper * max(log_R, Fraction(1)) * (
        R_upper + logH_upper + 1
    )


# -- closed-form envelopes for the family data -----------------------------

def _seq_coeff_data(fam: FamilyInstance, bits: int = 128):
    """Rational upper/lower envelopes of the coefficient polynomials."""
    cA, cB = fam.A.dominant_coeff, fam.B.dominant_coeff
    data = {
        "U_A": cA.abs_coeff_sum_upper(bits)
        + sum((c.abs_coeff_sum_upper(bits) for _, c in fam.A.secondary), Fraction(0)),
        "U_B": cB.abs_coeff_sum_upper(bits)
        + sum((c.abs_coeff_sum_upper(bits) for _, c in fam.B.secondary), Fraction(0)),
        "L_A": cA.abs_lower_inf(2, bits),
        "L_B": cB.abs_lower_inf(2, bits),
    }
    if fam.equal_modulus:
        diff = coeff_poly_sub(cB, cA)
        data["U_diff"] = diff.abs_coeff_sum_upper(bits)
        data["L_diff"] = diff.abs_lower_inf(2, bits)
    return data


def _log_iv(x, bits):
    return iv.log(iv_from_fraction(Fraction(x), bits))


def log_coeff_bound(fam: FamilyInstance, n: int, bits: int = 128) -> Fraction:
    """Upper bound m(n) on |log| of every coefficient value at n (dominant
    coefficients and, in the equal-modulus case, their difference)."""
    d = _seq_coeff_data(fam, bits)
    lows = [d["L_A"], d["L_B"]] + ([d["L_diff"]] if fam.equal_modulus else [])
    ups = [d["U_A"], d["U_B"]] + ([d["U_diff"]] if fam.equal_modulus else [])
    with interval_bits(bits):
        neg = max(abs(iv_inf(_log_iv(lo, bits))) for lo in lows)
        pos = max(iv_sup(_log_iv(up, bits)) for up in ups)
        logn = iv_sup(iv.log(iv.mpf(n))) if n > 1 else Fraction(0)
    return max(neg, pos + fam.d2 * logn)


def _alpha_beta_logs(fam: FamilyInstance, bits: int):
    la = iv.log(abs(fam.alpha.approx(bits)))
    lb = iv.log(abs(fam.beta.approx(bits)))
    return la, lb


def _sup_clamped(x, cap_bits: int = 256) -> Fraction:
    """Upper endpoint as a Fraction, rounded up to 2^-cap_bits when the value
    is even tinier (an exact conversion would need astronomically long
    denominators)."""
    sign, man, exp, bc = x._mpi_[1]
    if man != 0 and exp + bc < -cap_bits:
        return Fraction(1, 2**cap_bits) if not sign else Fraction(0)
    return iv_sup(x)


def lterm_sup(consts, d2: int, n: int, bits: int = 128) -> Fraction:
    """Rational upper bound of the decaying error envelope C n^d2 eps^n."""
    if consts.eps == 0:
        return Fraction(0)
    with interval_bits(bits):
        v = (
            iv_from_fraction(consts.C, bits)
            * iv.mpf(n) ** d2
            * iv_from_fraction(consts.eps, bits) ** n
        )
        return _sup_clamped(v)


def regulator_bounds(fam: FamilyInstance, consts, n: int, bits: int = 128):
    """Closed-form enclosure (R_low, R_up) of the regulator at n, from the
    log approximations with every coefficient log ranging over [-m, m]."""
    m = log_coeff_bound(fam, n, bits)
    e = lterm_sup(consts, fam.d2, n, bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        u1 = iv_from_fractions(-(m + e), m + e, bits)
        u2 = iv_from_fractions(-(2 * m + e), 2 * m + e, bits)
        x1 = n * lb + u1  # log|l1|
        y1 = n * lb + u1  # log|l1 - A|
        x2 = n * la + u1  # log|l2|
        y2 = -n * (la + lb) - u2  # log|l2 - A|
        det = abs(x1 * y2 - x2 * y1)
    lo, up = iv_inf(det), iv_sup(det)
    return max(Fraction(0), lo), up


def logH_upper(fam: FamilyInstance, consts, n: int, bits: int = 128) -> Fraction:
    """Upper bound on log of the largest form coefficient, |A_n B_n|."""
    m = log_coeff_bound(fam, n, bits)
    e = lterm_sup(consts, fam.d2, n, bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        top = n * (la + lb)
        val = iv_sup(top) + 2 * (m + 1) + e
    return max(val, Fraction(2))  # H >= 3 floor


@dataclass(frozen=True)
class LogyUpper:
    value: Fraction
    n4logn_coeff: float


def logy_upper(fam: FamilyInstance, consts, n: int, bits: int = 128) -> LogyUpper:
    """Explicit upper bound on log|y| for any solution at parameter n."""
    r_low, r_up = regulator_bounds(fam, consts, n, bits)
    val = bugy_bound(r_up, logH_upper(fam, consts, n, bits), bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        q = iv_sup(lb * (2 * la + lb))
    coeff = 2.0 * float(C_RANK2_CUBIC) * float(q) ** 2
    return LogyUpper(value=val, n4logn_coeff=coeff)


# -- linear-form lower bound -----------------------------------------------

def baker_constant(t: int, D: int) -> int:
    """18 (t+1)! t^(t+1) (32 D)^(t+2), exactly."""
    return 18 * math.factorial(t + 1) * t ** (t + 1) * (32 * D) ** (t + 2)


def baker_lower(heights, D: int, log_B: Fraction, t: int = None, bits: int = 128) -> Fraction:
    """Lower bound on the log of a nonzero linear form in t logarithms:
    -18 (t+1)! t^(t+1) (32D)^(t+2) log(2tD) h_1 ... h_t log B."""
    heights = [Fraction(h) for h in heights]
    t = t if t is not None else len(heights)
    if t < 1 or len(heights) != t:
        raise ValueError("need one height per logarithm")
    floor = Fraction(16, 100) / D
    for h in heights:
        if h < floor:
            raise SplitThueError(f"height {h} below its floor {floor}")
    K = baker_constant(t, D)
    with interval_bits(bits):
        log2tD = iv_sup(iv.log(iv.mpf(2 * t * D)))
    prod = Fraction(1)
    for h in heights:
        prod *= h
    return -K * log2tD * prod * max(log_B, Fraction(1))


def coeff_poly_height_upper(poly: CoefficientPolynomial, n: int, budget=DEFAULT_BUDGET) -> Fraction:
    """h(c(n)) <= sum_j (h(a_j) + j log n) + log(#terms)."""
    bits = budget.working_bits
    total = Fraction(0)
    terms = 0
    with interval_bits(bits):
        logn = iv_sup(iv.log(iv.mpf(n))) if n > 1 else Fraction(0)
        log_terms = iv_sup(iv.log(iv.mpf(poly.degree + 1)))
    for j, a in enumerate(poly.coeffs):
        total += iv_sup(a.height(budget)) + j * logn
        terms += 1
    return total + log_terms


def compositum_degree(elements, budget=DEFAULT_BUDGET) -> int:
    """Degree of the field generated by the given algebraic numbers, found
    by primitive-element trials gamma + k*delta over enough shifts k."""
    gamma = None
    for el in elements:
        if gamma is None:
            gamma = el
            continue
        d1 = len(gamma.min_poly) - 1
        d2 = len(el.min_poly) - 1
        if d2 == 1:
            continue
        if d1 == 1:
            gamma = el
            continue
        cap = d1 * d2
        trials = max(3, (d1 * d2 * (d1 * d2 - 1)) // 2 + 1)
        best = None
        best_deg = 0
        for k in range(1, trials + 1):
            shifted = field_arith(el, AlgebraicNumber.from_rational(k), "mul", budget)
            cand = field_arith(gamma, shifted, "add", budget)
            deg = len(cand.min_poly) - 1
            if deg > best_deg:
                best_deg, best = deg, cand
            if best_deg == cap:
                break
        gamma = best
    return len(gamma.min_poly) - 1 if gamma is not None else 1


def field_degree(fam: FamilyInstance, budget=DEFAULT_BUDGET) -> int:
    """Degree of the compositum of the roots and coefficient values."""
    elements = [fam.alpha, fam.beta]
    for seq in (fam.A, fam.B):
        elements.extend(seq.dominant_coeff.coeffs)
        for root, coeff in seq.secondary:
            elements.append(root)
            elements.extend(coeff.coeffs)
    return compositum_degree(elements, budget)


def xi_heights(fam: FamilyInstance, n: int, D: int, budget=DEFAULT_BUDGET):
    """Per-argument height bounds (with Baker floors) for the transformed
    form's logarithms at parameter n."""
    bits = budget.working_bits
    m = log_coeff_bound(fam, n, bits)
    floor = Fraction(16, 100) / D
    out = []
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        la_abs, lb_abs = iv_sup(abs(la)), iv_sup(abs(lb))
    h_alpha = iv_sup(fam.alpha.height(budget))
    h_beta = iv_sup(fam.beta.height(budget))
    out.append(("alpha", max(h_alpha, la_abs / D, floor)))
    if not fam.equal_modulus:
        out.append(("beta", max(h_beta, lb_abs / D, floor)))
    hA = coeff_poly_height_upper(fam.A.dominant_coeff, n, budget)
    hB = coeff_poly_height_upper(fam.B.dominant_coeff, n, budget)
    out.append(("cA", max(hA, m / D, floor)))
    out.append(("cB", max(hB, m / D, floor)))
    if fam.equal_modulus:
        diff = coeff_poly_sub(fam.B.dominant_coeff, fam.A.dominant_coeff)
        hd = coeff_poly_height_upper(diff, n, budget)
        out.append(("cB-cA", max(hd, m / D, floor)))
    return out


def exponent_bound_B(fam: FamilyInstance, consts, n: int, logy: Fraction, R_low: Fraction, bits: int = 128) -> Fraction:
    """Upper bound on max(|b1|, |b2|) from the inverted log system, times n
    to cover the transformed form's table coefficients."""
    if R_low <= 0:
        raise ValueError("need a positive regulator lower bound")
    m = log_coeff_bound(fam, n, bits)
    e = lterm_sup(consts, fam.d2, n, bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        entry = iv_sup(n * (la + lb)) + 2 * m + e  # largest |log| matrix entry
        maxdiff = iv_sup(n * lb) + m + e  # largest log root difference
    b_bound = (2 * entry) * (logy + maxdiff) / R_low + 1
    return 4 * n * (b_bound + 1)


def xi_upper_log(fam: FamilyInstance, consts, n: int, bits: int = 128) -> Fraction:
    """log of the right-hand side of the transformed-form upper bound,
    evaluated in closed form (safe at astronomically large n)."""
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        log_c5 = iv.log(iv_from_fraction(consts.c5, bits))
        logn = iv.log(iv.mpf(n))
        t1 = iv.log(iv.mpf(4)) - 3 * log_c5 - fam.d1 * logn - n * (2 * la + lb)
        if consts.eps == 0:
            return iv_sup(t1)
        log_eps = iv.log(iv_from_fraction(consts.eps, bits))
        t2 = iv.log(iv_from_fraction(6 * consts.C, bits)) + fam.d2 * logn + n * log_eps
        log2 = iv.log(iv.mpf(2))
        return max(iv_sup(t1), iv_sup(t2)) + iv_sup(log2)


def logy_lower_altunit(fam: FamilyInstance, consts, n: int, bits: int = 128) -> Fraction:
    """Exponential lower bound on log|y| for type-1 solutions when the
    dominant roots have distinct moduli, via the alternative unit pair.

    Returns 0 when n is too small for the chain to say anything.
    """
    if fam.equal_modulus:
        raise SplitThueError("chain requires distinct dominant-root moduli")
    r_low, _ = regulator_bounds(fam, consts, n, bits)
    if r_low <= 2:
        return Fraction(0)
    d = _seq_coeff_data(fam, bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        ratio = (
            iv_from_fraction(d["U_A"], bits)
            * iv.mpf(n) ** fam.d2
            * abs(fam.alpha.approx(bits)) ** n
            * 2
            / (iv_from_fraction(d["L_B"], bits) * abs(fam.beta.approx(bits)) ** n)
        )
        q = _sup_clamped(ratio)
    if q >= Fraction(1, 4):
        return Fraction(0)
    delta_up = 4 * q
    return (r_low - 2) / delta_up


def log_logy_lower_altunit(fam: FamilyInstance, consts, n: int, bits: int = 128):
    """log of the alternative-unit lower bound, computed entirely in the log domain.

    The direct evaluation clamps the decay factor q at 2^-256, which
    forfeits the contradiction at astronomically large n; log q is linear
    in n and stays exact-scale.  Returns None while the chain is vacuous.
    """
    if fam.equal_modulus:
        raise SplitThueError("chain requires distinct dominant-root moduli")
    r_low, _ = regulator_bounds(fam, consts, n, bits)
    if r_low <= 2:
        return None
    d = _seq_coeff_data(fam, bits)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        logn = iv.log(iv.mpf(n))
        log_q = (
            iv.log(iv_from_fraction(2 * d["U_A"], bits))
            + fam.d2 * logn
            + n * (la - lb)
            - iv.log(iv_from_fraction(d["L_B"], bits))
        )
        log_quarter = iv.log(iv_from_fraction(Fraction(1, 4), bits))
        if iv_sup(log_q) >= iv_inf(log_quarter):
            return None
        log_lower = (
            iv.log(iv_from_fraction(r_low - 2, bits))
            - iv.log(iv.mpf(4))
            - log_q
        )
        return iv_inf(log_lower)


def logy_lower_eq8(fam: FamilyInstance, consts, n: int, D: int, bits: int = 128) -> Fraction:
    """Linear-in-n lower bound on log|y| from applying the logarithm lower
    bound directly to the untransformed form (heights linear in n)."""
    m = log_coeff_bound(fam, n, bits)
    e = lterm_sup(consts, fam.d2, n, bits)
    r_low, r_up = regulator_bounds(fam, consts, n, bits)
    if r_low <= 0:
        return Fraction(0)
    with interval_bits(bits):
        la, lb = _alpha_beta_logs(fam, bits)
        # heights of the three unit/root-quotient arguments: each is a ratio
        # of numbers of log-magnitude <= n(la+lb) + 2m; degree <= 3D field
        h_arg = (Fraction(2, 3) * (iv_sup(n * (la + lb)) + 2 * m) + 1)
        S = iv_inf(n * (2 * la + lb)) - 3 * abs(
            iv_sup(iv.log(iv_from_fraction(max(consts.c5, Fraction(1, 10**6)), bits)))
        ) - 2
        entry = iv_sup(n * (la + lb)) + 2 * m + e
        maxdiff = iv_sup(n * lb) + m + e
    if S <= 0:
        return Fraction(0)
    K = baker_constant(3, 3 * D)
    with interval_bits(bits):
        log6D = iv_sup(iv.log(iv.mpf(6 * 3 * D)))
    denom = K * log6D * h_arg**3
    log_B_min = S / denom  # Baker forces log B >= this
    with interval_bits(bits):
        B_min = iv_inf(iv.exp(iv_from_fraction(log_B_min, bits)))
    lower = r_low * (B_min - 3) / (2 * entry) - maxdiff
    return max(Fraction(0), lower)


# -- the crossing search ---------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    n: int
    branch: str
    R_upper: float
    logy_upper: float
    heights: tuple
    baker_lower_exponent: float
    xi_upper_log: float
    verdict: str
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        want = "contradiction" if self.baker_lower_exponent > self.xi_upper_log else "no-contradiction"
        if self.verdict != want:
            raise ValueError("verdict inconsistent with the recorded bounds")


@dataclass(frozen=True)
class N0Result:
    n0: int | None
    no_crossing: bool
    n_cap: int
    branch_thresholds: dict
    trace: tuple


def _branch_report(fam, consts, n, branch, D, budget, bits=160) -> BoundReport:
    r_low, r_up = regulator_bounds(fam, consts, n, bits)
    ly = logy_upper(fam, consts, n, bits)
    if branch == "altunit-j1":
        # log-domain comparison: chain lower bound vs upper bound
        log_lower = log_logy_lower_altunit(fam, consts, n, bits)
        with interval_bits(bits):
            lo = float(log_lower) if log_lower is not None else float("-inf")
            up = float(iv_sup(iv.log(iv_from_fraction(ly.value, bits))))
        verdict = "contradiction" if lo > up else "no-contradiction"
        return BoundReport(
            n=n, branch=branch, R_upper=float(r_up), logy_upper=float(ly.value),
            heights=(), baker_lower_exponent=lo, xi_upper_log=up, verdict=verdict,
        )
    j = int(branch.split("-j")[1])
    heights = xi_heights(fam, n, D, budget)
    if r_low <= 0:
        return BoundReport(
            n=n, branch=branch, R_upper=float(r_up), logy_upper=float(ly.value),
            heights=tuple((lab, float(h)) for lab, h in heights),
            baker_lower_exponent=float("-inf"),
            xi_upper_log=float(xi_upper_log(fam, consts, n, bits)),
            verdict="no-contradiction",
            extras={"note": "regulator lower bound not yet positive"},
        )
    B_exp = exponent_bound_B(fam, consts, n, ly.value, r_low, bits)
    with interval_bits(bits):
        log_B = iv_sup(iv.log(iv_from_fraction(B_exp, bits)))
    lower = float(baker_lower([h for _, h in heights], D, log_B, bits=bits))
    upper = float(xi_upper_log(fam, consts, n, bits))
    verdict = "contradiction" if lower > upper else "no-contradiction"
    return BoundReport(
        n=n, branch=branch, R_upper=float(r_up), logy_upper=float(ly.value),
        heights=tuple((lab, float(h)) for lab, h in heights),
        baker_lower_exponent=lower,
        xi_upper_log=upper,
        verdict=verdict,
        extras={"B": float(B_exp), "D": D},
    )


def compute_n0(
    fam: FamilyInstance,
    consts=None,
    n_cap: int = 10**7,
    window: int = 10,
    n_start: int = 8,
    budget=DEFAULT_BUDGET,
) -> N0Result:
    """Smallest n beyond which every solution-type branch yields a
    contradiction between the lower and upper linear-form bounds, verified
    over a sanity window; per-branch thresholds and a probe trace included."""
    if consts is None:
        from .cubic import compute_constants

        consts = compute_constants(fam)
    D = field_degree(fam, budget)
    branches = ["xi-j2", "xi-j3"]
    if fam.equal_modulus:
        branches.append("xi-j1")
    else:
        branches.append("altunit-j1")

    trace = []

    def contra(n, branch):
        rep = _branch_report(fam, consts, n, branch, D, budget)
        trace.append(rep)
        return rep.verdict == "contradiction"

    thresholds = {}
    no_crossing = False
    for branch in branches:
        lo, hi = None, None
        n = max(2, n_start)
        while n <= n_cap:
            if contra(n, branch):
                hi = n
                break
            lo = n
            n *= 2
        if hi is None:
            # last chance: probe the cap itself before giving up
            if lo is not None and lo < n_cap and contra(n_cap, branch):
                lo, hi = lo, n_cap
            else:
                thresholds[branch] = None
                no_crossing = True
                continue
        lo = lo if lo is not None else hi - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if contra(mid, branch):
                hi = mid
            else:
                lo = mid
        # sanity window, advancing past any non-monotone wiggle
        start = hi
        while start <= n_cap:
            if all(contra(start + w, branch) for w in range(window + 1)):
                break
            start += 1
        if start > n_cap:
            thresholds[branch] = None
            no_crossing = True
        else:
            thresholds[branch] = start
    n0 = None
    if not no_crossing:
        n0 = max(thresholds.values())
    return N0Result(
        n0=n0,
        no_crossing=no_crossing,
        n_cap=n_cap,
        branch_thresholds=thresholds,
        trace=tuple(trace),
    )
