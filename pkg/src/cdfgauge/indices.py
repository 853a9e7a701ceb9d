"""Quantitative compactness indices for template-presented CDF families.

The escape index is evaluated in closed form (suprema over n come from the
tail templates, the infimum over the window size from the finitely many
support breakpoints).  The limit operator is bracketed from a phi-gauge
grid below and an exact continuity-point supremum against the pointwise
limit above.  Helly selection is constructivized by grid stabilization,
and the two bounds meet in the Prokhorov bracket.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cdf import (
    Cdf,
    Q,
    Rational,
    SupportBound,
    ZERO,
    ONE,
    as_q,
    from_parts,
    parts_knots,
    parts_mass,
    sub_eval,
    sub_left_limit,
)
from .families import FamilySpec, ParametricTail, SequenceSpec, TemplateError
from .gauges import phi, phi_raw, uniform_distance


class StabilizationError(RuntimeError):
    """A tail's values on the refinement grid did not settle within the
    horizon; carries the offending grid point."""

    def __init__(self, grid_point: Fraction, horizon: int):
        self.grid_point = grid_point
        self.horizon = horizon
        super().__init__(
            f"values at grid point {grid_point} did not stabilize within "
            f"horizon {horizon}"
        )


class WindowError(ValueError):
    """The truncation window is too small for the requested tolerance."""


@dataclass(frozen=True)
class HellyResult:
    """Constructive outcome of Helly selection on a window [-M, M]."""

    selector: tuple[int, ...]
    limit: Cdf
    lambda_bound: Fraction
    truncation: SupportBound

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.selector, self.selector[1:])):
            raise ValueError("selector must be strictly increasing")
        ks = self.limit.knots()
        if ks[0] < self.truncation.low or ks[-1] > self.truncation.high:
            raise ValueError("limit CDF leaves the truncation window")


@dataclass(frozen=True)
class IndexBracket:
    """Certified lower/upper bounds for an index, with witnesses."""

    lower: Fraction
    upper: Fraction
    lower_witness: str = ""
    upper_witness: object | None = None

    def __post_init__(self):
        if not (ZERO <= self.lower <= self.upper <= ONE):
            raise ValueError(
                f"invalid bracket [{self.lower}, {self.upper}] outside 0..1"
            )


# -- escape index -----------------------------------------------------------


def _family_profile(family: FamilySpec, M: Fraction) -> Fraction:
    """sup over the whole family of max{F(-M), 1 - F(M)}."""
    worst = ZERO
    for F in family.explicit:
        worst = max(worst, F.eval(-M), 1 - F.eval(M))
    for tail in family.tails:
        worst = max(worst, tail.escape_contribution(M))
    return worst


def escape_index(family: FamilySpec) -> Fraction:
    """inf over M of the family's worst mass outside [-M, M], exact.

    The profile is non-increasing in M and constant past twice the
    coordinate scale, so one evaluation there realizes the infimum; a
    second evaluation at a larger window guards the closed forms.
    """
    M = 2 * family.coordinate_scale() + 1
    value = _family_profile(family, M)
    assert _family_profile(family, 2 * M + 1) == value
    return value


def is_tight(family: FamilySpec) -> bool:
    """Tight iff no mass escapes: escape index exactly zero."""
    return escape_index(family) == 0


# -- limit operator ---------------------------------------------------------


def _phi_limit_right_shift(F: Cdf, beta: Fraction, base: Cdf) -> Fraction:
    """lim of phi(F, beta, shift(base, t)) as t -> 0+, in closed form.

    Every candidate expression converges to a one-sided evaluation of F
    and base, and the max of finitely many continuous candidates passes
    to the limit.
    """
    best = ZERO
    for q in base.knots():
        best = max(
            best,
            F.eval(q - beta) - base.eval(q),
            F.eval(q - beta) - base.left_limit(q),
            base.eval(q) - F.eval(q + beta),
            base.left_limit(q) - F.eval(q + beta),
        )
    for p in F.knots():
        best = max(
            best,
            F.eval(p) - base.left_limit(p + beta),
            F.left_limit(p) - base.left_limit(p + beta),
            base.left_limit(p - beta) - F.eval(p),
            base.left_limit(p - beta) - F.left_limit(p),
        )
    return best


def eventual_phi(seq: SequenceSpec, F: Cdf, beta: Rational) -> Fraction:
    """limsup over n of phi(F, beta, F_n), exact from the template."""
    b = as_q(beta)
    if b <= 0:
        raise ValueError("beta must be positive")
    if seq.template == "constant":
        return phi(F, b, seq.base)
    if isinstance(seq.t, tuple):
        return phi(F, b, seq.member(len(seq.t)))
    if seq.t == "1/n":
        return max(ZERO, _phi_limit_right_shift(F, b, seq.base))
    fk = F.knots()
    coord = max(abs(fk[0]), abs(fk[-1])) + b + 1
    n0 = seq.stabilization_index(coord)
    value = phi(F, b, seq.member(n0))
    assert phi(F, b, seq.member(n0 + 1)) == value
    return value


def lambda_exact(seq: SequenceSpec, F: Cdf) -> Fraction:
    """Exact limit-operator value of (F_n) at F via the net basis: the
    supremum over continuity points of F of |F - pointwise limit|, plus
    the escaped-mass deficit at +infinity."""
    L = seq.limit_parts()
    m = parts_mass(L)
    best = abs(1 - m)
    for c in set(F.knots()) | set(parts_knots(L)):
        best = max(
            best,
            abs(F.eval(c) - sub_eval(L, c)),
            abs(F.left_limit(c) - sub_left_limit(L, c)),
        )
    return min(ONE, best)


def limit_operator(
    seq: SequenceSpec, F: Cdf, alpha_grid: Sequence[Rational]
) -> IndexBracket:
    """Bracket for the limit operator of the sequence at F.

    Each grid width contributes an exact lower bound (phi is anti-monotone
    in the width, so finer grids only raise it); the upper bound is the
    exact continuity-point supremum against the pointwise limit; the basis
    interchange bounds make this the common value of both gauge bases.
    """
    grid = sorted({as_q(a) for a in alpha_grid}, reverse=True)
    if not grid or grid[-1] <= 0:
        raise ValueError("alpha grid must be nonempty and positive")
    lower = ZERO
    best_alpha = grid[0]
    for a in grid:
        v = eventual_phi(seq, F, a)
        if v > lower:
            lower, best_alpha = v, a
    upper = lambda_exact(seq, F)
    assert lower <= upper
    return IndexBracket(
        lower=lower,
        upper=upper,
        lower_witness=f"phi width {best_alpha} attains {lower}",
    )


DEFAULT_ALPHA_GRID = tuple(Q(1, n) for n in range(1, 65))


# -- Helly selection --------------------------------------------------------


def helly_select(
    seq: SequenceSpec,
    window: SupportBound,
    grid_step: Rational,
    eps: Rational,
) -> HellyResult:
    """Subsequence selector, truncated limit CDF and its limit-operator
    bound, built by stabilization on a rational grid inside the window."""
    step = as_q(grid_step)
    e = as_q(eps)
    if step <= 0 or e <= 0:
        raise ValueError("grid_step and eps must be positive")
    if window.low != -window.high or window.high <= 0:
        raise WindowError("window must be a symmetric interval [-M, M], M > 0")
    M = window.high
    chi = escape_index(FamilySpec(tails=(seq,)))
    if seq.escape_contribution(M) > chi + e:
        raise WindowError(
            f"window [-{M}, {M}] leaves profile {seq.escape_contribution(M)} "
            f"> escape index {chi} + eps {e}"
        )

    n_stab = 1
    g = window.low
    while g <= window.high:
        n_g = seq.settle_index(g)
        if n_g > seq.horizon:
            raise StabilizationError(g, seq.horizon)
        assert seq.member(n_g).eval(g) == seq.pointwise_limit_value(g)
        n_stab = max(n_stab, n_g)
        g += step

    gtilde = _truncate_limit(seq.limit_parts(), window)
    lam = min(ONE, lambda_exact(seq, gtilde))
    if lam > chi + e:
        raise AssertionError(
            f"limit-operator value {lam} exceeds certified bound {chi + e}"
        )
    prefix = tuple(range(n_stab, n_stab + 16))
    return HellyResult(
        selector=prefix, limit=gtilde, lambda_bound=lam, truncation=window
    )


def _truncate_limit(parts, window: SupportBound) -> Cdf:
    """Window truncation: 0 below the window, the (right-continuous)
    pointwise limit inside, 1 from the upper edge on; escaped mass piles
    up as jumps at the two edges."""
    low, high = window.low, window.high
    jumps = []
    at_low = sub_eval(parts, low)
    if at_low > 0:
        jumps.append((low, at_low))
    segs = []
    pj, ps = parts
    for loc, mass in pj:
        if low < loc < high:
            jumps.append((loc, mass))
    for l, r, mass in ps:
        lo = max(l, low)
        hi = min(r, high)
        if lo < hi:
            segs.append((lo, hi, mass * (hi - lo) / (r - l)))
    at_high = 1 - sub_left_limit(parts, high)
    if at_high > 0:
        jumps.append((high, at_high))
    return from_parts(jumps, segs)


# -- Prokhorov bracket ------------------------------------------------------


def _window_for(seq: SequenceSpec, eps: Fraction) -> SupportBound:
    """Smallest doubling window whose profile is within eps of the
    sequence's own escape index."""
    chi = escape_index(FamilySpec(tails=(seq,)))
    M = seq.coordinate_scale() + 1
    while seq.escape_contribution(M) > chi + eps:
        M *= 2
    return SupportBound(low=-M, high=M)


def prokhorov_bracket(
    family: FamilySpec, eps: Rational, grid_step: Rational = Q(1, 4)
) -> IndexBracket:
    """Two-sided bracket for the relative sequential compactness index.

    The lower bound is the exact escape index; the upper bound is the
    worst Helly limit-operator bound over the family's sequence sources
    (each explicit member as a constant sequence, each tail as itself).
    """
    e = as_q(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    lower = escape_index(family)
    sources: list[SequenceSpec] = [
        SequenceSpec(template="constant", base=F) for F in family.explicit
    ]
    sources.extend(family.tails)
    upper = lower
    witness: HellyResult | None = None
    for seq in sources:
        window = _window_for(seq, e)
        res = helly_select(seq, window, grid_step, e)
        if res.lambda_bound >= upper:
            upper, witness = res.lambda_bound, res
    upper = min(ONE, upper)
    bracket = IndexBracket(
        lower=lower,
        upper=upper,
        lower_witness=f"escape index at window {2 * family.coordinate_scale() + 1}",
        upper_witness=witness,
    )
    assert bracket.upper <= lower + e
    return bracket


def weak_rsc_flag(family: FamilySpec, eps: Rational) -> bool:
    """Decision for weak relative sequential compactness at tolerance eps:
    the bracket's upper bound vanishes up to eps exactly when the family
    is tight."""
    return prokhorov_bracket(family, eps).upper <= as_q(eps)


# -- Lindelof witness -------------------------------------------------------


def lindelof_witness(test_set: Sequence[Cdf], eps: Rational) -> list[Cdf]:
    """Rational staircase CDFs covering the test set at gauge level eps.

    Each cover C samples its target on a grid of width eps/2, making
    C(x) <= F(x) everywhere with a grid point inside every [x, x + eps/2],
    so phi(C, eps/2, F) vanishes and the phi-ball of radius eps at C
    certifies the cover.
    """
    e = as_q(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    alpha = e / 2
    covers: list[Cdf] = []
    for F in test_set:
        if any(phi(C, alpha, F) < e for C in covers):
            continue
        covers.append(_staircase(F, alpha))
        assert phi(covers[-1], alpha, F) < e
    return covers


def _staircase(F: Cdf, h: Fraction) -> Cdf:
    sup = F.support()
    jumps = []
    prev = ZERO
    g = sup.low - h
    while True:
        v = ONE if g >= sup.high else F.eval(g)
        if v > prev:
            jumps.append((g, v - prev))
            prev = v
        if g >= sup.high:
            break
        g += h
    return Cdf(jumps=tuple(jumps), segments=())
