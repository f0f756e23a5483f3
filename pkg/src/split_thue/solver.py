"""Exact brute-force solving of |X(X - A Y)(X - B Y) - Y^3| = 1 at concrete
parameters, solution classification, and the family verification pipeline."""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from .precision import DEFAULT_BUDGET
from .sequences import FamilyInstance, check_hypotheses_at


@dataclass(frozen=True, order=True)
class Solution:
    x: int
    y: int
    n: int
    sign: int
    classification: str

    def verify(self, A: int, B: int) -> bool:
        return self.x * (self.x - A * self.y) * (self.x - B * self.y) - self.y**3 == self.sign


def classify(x: int, y: int, A: int, B: int) -> str:
    """Match against the eight-member trivial orbit."""
    if (x, y) in ((1, 0), (-1, 0)):
        return "trivial-(1,0)"
    if (x, y) in ((0, 1), (0, -1)):
        return "trivial-(0,1)"
    if (x, y) in ((A, 1), (-A, -1)):
        return "trivial-(A,1)"
    if (x, y) in ((B, 1), (-B, -1)):
        return "trivial-(B,1)"
    return "nontrivial"


def _floor_crit(num: int, ysq_S: int, sign: int) -> int:
    """Exact floor of (num + sign*sqrt(ysq_S)) / 3 for integers, where the
    square root is taken of a nonnegative integer."""
    r = isqrt(ysq_S)
    # initial estimate, then correct with the exact predicate
    # k <= (num + sign*sqrt(S'))/3  <=>  sign*sqrt(S') >= 3k - num
    est = (num + sign * r) // 3
    def le(k):
        rhs = 3 * k - num
        if sign > 0:
            if rhs <= 0:
                return True
            return rhs * rhs <= ysq_S
        if rhs > 0:
            return False
        return rhs * rhs >= ysq_S
    k = est
    while le(k + 1):
        k += 1
    while not le(k):
        k -= 1
    return k


def _search_piece(p, lo, hi, t, increasing):
    """All integer x in [lo, hi] with p(x) == t, for p monotone there.

    Either bound may be None, meaning the piece is unbounded on that side.
    """
    if lo is None:
        # grow downward until p passes t
        anchor = hi
        step = 1
        lo = anchor
        while (p(lo) > t) if increasing else (p(lo) < t):
            lo = anchor - step
            step *= 2
            if step > 1 << 200:  # unreachable for genuine cubics
                return []
    if hi is None:
        anchor = lo
        step = 1
        hi = anchor
        while (p(hi) < t) if increasing else (p(hi) > t):
            hi = anchor + step
            step *= 2
            if step > 1 << 200:
                return []
    if lo > hi:
        return []
    a, b = lo, hi
    while a < b:
        mid = (a + b) // 2
        v = p(mid)
        if v == t:
            return [mid]
        if (v < t) == increasing:
            a = mid + 1
        else:
            b = mid - 1
    return [a] if a == b and p(a) == t else []


def _solve_fixed_y(A: int, B: int, y: int, t: int):
    """Integer roots of x(x - Ay)(x - By) = t for fixed y > 0, exactly.

    The cubic is split at its two critical points into three monotone
    pieces, each resolved by exact big-integer binary search.
    """
    c2 = -(A + B) * y
    c1 = A * B * y * y

    def p(x):
        return x * (x * (x + c2) + c1)

    S = A * A - A * B + B * B  # discriminant quarter: crit pts exist iff S > 0
    if S <= 0:
        # strictly monotone cubic (only possible for A = B = 0)
        return _search_piece(p, None, None, t, True)
    num = (A + B) * y
    ys_S = y * y * S
    f_minus = _floor_crit(num, ys_S, -1)  # floor of smaller critical point
    f_plus = _floor_crit(num, ys_S, +1)  # floor of larger critical point
    out = []
    out += _search_piece(p, None, f_minus, t, True)
    out += _search_piece(p, f_minus + 1, f_plus, t, False)
    out += _search_piece(p, f_plus + 1, None, t, True)
    return out


def solve_bruteforce(fam, n: int, y_max: int):
    """All solutions with |y| <= y_max, for both signs of the right side.

    ``fam`` may be a FamilyInstance or a plain (A, B) integer pair.
    """
    if y_max < 1:
        raise ValueError("y_max must be >= 1")
    if isinstance(fam, tuple):
        A, B = fam
    else:
        A, B = fam.terms(n)
    found = set()
    for s in (1, -1):
        found.add((s, 0, n, s, classify(s, 0, A, B)))  # y = 0: x^3 = s
    for y in range(1, y_max + 1):
        y3 = y**3
        for s in (1, -1):
            for x in _solve_fixed_y(A, B, y, y3 + s):
                found.add((x, y, n, s, classify(x, y, A, B)))
                # the mirrored solution flips the attained sign
                found.add((-x, -y, n, -s, classify(-x, -y, A, B)))
    sols = sorted(Solution(*f) for f in found)
    for sol in sols:
        assert sol.verify(A, B), "solver produced a non-solution"
    return sols


@dataclass(frozen=True)
class PerNReport:
    n: int
    in_scope: bool
    hypothesis_failures: tuple
    solutions: tuple
    nontrivial: tuple
    lemma_root_approx: bool | None
    lemma_log_approx: bool | None
    lemma_root_diff: bool | None
    xi_bound_ok: bool | None


@dataclass(frozen=True)
class FamilyVerification:
    n_lo: int
    n_hi: int
    y_max: int
    per_n: tuple

    @property
    def nontrivial_found(self):
        return tuple(s for rep in self.per_n for s in rep.nontrivial)

    @property
    def all_in_scope_clean(self):
        return all((not r.in_scope) or not r.nontrivial for r in self.per_n)


def verify_family(
    fam: FamilyInstance, n_lo: int, n_hi: int, y_max: int, budget=DEFAULT_BUDGET,
    with_lemmas: bool = True,
) -> FamilyVerification:
    """Hypothesis check + brute force + classification for each n in range,
    with per-n lemma summaries where the roots are certifiable."""
    from . import cubic, units

    if n_lo > n_hi:
        raise ValueError("empty n range")
    consts = cubic.compute_constants(fam) if with_lemmas else None
    reports = []
    for n in range(n_lo, n_hi + 1):
        ok, reasons = check_hypotheses_at(fam, n, budget)
        if not ok:
            reports.append(
                PerNReport(n, False, reasons, (), (), None, None, None, None)
            )
            continue
        sols = tuple(solve_bruteforce(fam, n, y_max))
        nontrivial = tuple(s for s in sols if s.classification == "nontrivial")
        ra = la = rd = xi_ok = None
        if with_lemmas:
            try:
                rs = cubic.isolate_roots(fam, n, budget)
                ra = cubic.verify_root_approx(rs, fam).all_pass
                la = cubic.verify_log_approx(rs, fam, consts, budget).all_pass
                rd = cubic.verify_root_diff(rs, fam, consts, budget).all_pass
                xi_ok = True
                for s in sols:
                    if s.y == 0 and abs(s.x) == 1 and s.x < 0:
                        continue  # same orbit as (1,0)
                    j = units.solution_type(s.x, s.y, rs, budget)
                    ue = units.unit_decompose(s.x, s.y, rs, budget)
                    xi = units.xi_form(j, fam.case_tag, n, ue.b1, ue.b2)
                    if not units.verify_xi_bound(xi, fam, consts, n).ok:
                        xi_ok = False
            except cubic.AnchorSignFailure:
                pass
        reports.append(
            PerNReport(n, True, (), sols, nontrivial, ra, la, rd, xi_ok)
        )
    return FamilyVerification(n_lo, n_hi, y_max, tuple(reports))
