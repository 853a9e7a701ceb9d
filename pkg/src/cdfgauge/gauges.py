"""Distances and local gauges between CDFs.

Everything here is exact.  Suprema over the real line reduce to scans of a
finite candidate set: the knots of the operands (and their shifts), each
checked at the point value and at the left limit.  The Levy infimum is
found by locating the critical cell of the knot-difference geometry and
solving the active linear pieces there; a rational-bisection feasibility
test is exposed for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

from .cdf import Cdf, Q, Rational, ZERO, ONE, as_q

BasisKind = Literal["phi", "levy", "psi"]


class InvalidNetError(ValueError):
    """An F-net contained a discontinuity point of its center."""


# -- uniform (Kolmogorov) distance ------------------------------------------


def uniform_distance(F: Cdf, G: Cdf) -> Fraction:
    """sup_x |F(x) - G(x)|, exact via candidate-point scan."""
    best = ZERO
    for c in set(F.knots()) | set(G.knots()):
        best = max(best, abs(F.eval(c) - G.eval(c)), abs(F.left_limit(c) - G.left_limit(c)))
    return best


# -- phi gauge --------------------------------------------------------------


def _phi_candidates(F: Cdf, alpha: Fraction, G: Cdf):
    """Candidate x-locations for the two phi terms.

    Term 1 (F(x-a) - G(x)) has breakpoints at knots(G) and knots(F)+a,
    term 2 (G(x) - F(x+a)) at knots(G) and knots(F)-a.
    """
    gk = G.knots()
    fk = F.knots()
    t1 = set(gk) | {p + alpha for p in fk}
    t2 = set(gk) | {p - alpha for p in fk}
    return t1, t2


def phi_raw(F: Cdf, alpha: Fraction, G: Cdf) -> Fraction:
    """Unclamped sup_x max{F(x-a) - G(x), G(x) - F(x+a)}; always >= 0
    because both terms vanish at +-infinity."""
    t1, t2 = _phi_candidates(F, alpha, G)
    best = ZERO
    for c in t1:
        best = max(
            best,
            F.eval(c - alpha) - G.eval(c),
            F.left_limit(c - alpha) - G.left_limit(c),
        )
    for c in t2:
        best = max(
            best,
            G.eval(c) - F.eval(c + alpha),
            G.left_limit(c) - F.left_limit(c + alpha),
        )
    return best


def phi(F: Cdf, alpha: Rational, G: Cdf) -> Fraction:
    """The local gauge at center F with width alpha > 0, clamped to [0, 1]."""
    a = as_q(alpha)
    if a <= 0:
        raise ValueError(f"alpha must be positive, got {a}")
    return max(ZERO, phi_raw(F, a, G))


# -- F-nets and psi ---------------------------------------------------------


@dataclass(frozen=True)
class FNet:
    """A nonempty strictly increasing finite set of continuity points."""

    points: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.points:
            raise InvalidNetError("empty net")
        if any(self.points[i] >= self.points[i + 1] for i in range(len(self.points) - 1)):
            raise InvalidNetError("net points not strictly increasing")

    @classmethod
    def of(cls, points: Iterable[Rational]) -> "FNet":
        return cls(points=tuple(sorted(as_q(p) for p in points)))

    def validate_for(self, F: Cdf) -> None:
        for p in self.points:
            if not F.is_continuity_point(p):
                raise InvalidNetError(f"net point {p} is a discontinuity of the center")

    def union(self, other: "FNet") -> "FNet":
        return FNet.of(set(self.points) | set(other.points))


def psi(F: Cdf, net: FNet, G: Cdf) -> Fraction:
    """max over the net of |F(x) - G(x)|."""
    net.validate_for(F)
    return max(abs(F.eval(p) - G.eval(p)) for p in net.points)


# -- Levy metric with parameter gamma ---------------------------------------


def levy_feasible(gamma: Fraction, F: Cdf, G: Cdf, alpha: Fraction) -> bool:
    """Exact test of F(x - g*a) - a <= G(x) <= F(x + g*a) + a for all x."""
    return phi_raw(F, gamma * alpha, G) <= alpha


def _line_values(F: Cdf, G: Cdf, beta: Fraction) -> list[Fraction]:
    """Values of every candidate expression of phi_raw at the given beta,
    in a fixed enumeration order (so two betas give matched lines)."""
    gk = G.knots()
    fk = F.knots()
    out = [ZERO]
    for q in gk:
        out.append(F.eval(q - beta) - G.eval(q))
        out.append(F.left_limit(q - beta) - G.left_limit(q))
        out.append(G.eval(q) - F.eval(q + beta))
        out.append(G.left_limit(q) - F.left_limit(q + beta))
    for p in fk:
        out.append(F.eval(p) - G.eval(p + beta))
        out.append(F.left_limit(p) - G.left_limit(p + beta))
        out.append(G.eval(p - beta) - F.eval(p))
        out.append(G.left_limit(p - beta) - F.left_limit(p))
    return out


def levy(gamma: Rational, F: Cdf, G: Cdf) -> Fraction:
    """Levy metric with parameter gamma: the infimum of admissible alpha.

    The knot-difference set cuts the beta axis (beta = gamma*alpha) into
    cells on which every candidate expression is linear; the infimum is
    located by a monotone scan over cell boundaries and then solved exactly
    inside the critical cell.
    """
    g = as_q(gamma)
    if g <= 0:
        raise ValueError(f"gamma must be positive, got {g}")
    fk = F.knots()
    gk = G.knots()
    diffs = sorted({abs(q - p) for p in fk for q in gk if q != p})
    span = max(fk[-1], gk[-1]) - min(fk[0], gk[0]) + 1
    bounds = [ZERO] + [d for d in diffs if d < span] + [span]

    # monotone feasibility along cell boundaries (alpha = beta / gamma)
    lo_idx, hi_idx = 0, len(bounds) - 1
    if levy_feasible(g, F, G, bounds[0] / g):
        return ZERO
    if not levy_feasible(g, F, G, bounds[hi_idx] / g):
        # alpha = 1 is always admissible regardless of geometry
        return min(ONE, bounds[hi_idx] / g)
    while hi_idx - lo_idx > 1:
        mid = (lo_idx + hi_idx) // 2
        if levy_feasible(g, F, G, bounds[mid] / g):
            hi_idx = mid
        else:
            lo_idx = mid
    b_lo, b_hi = bounds[lo_idx], bounds[hi_idx]

    # interior of the critical cell: interpolate the candidate lines
    b1 = b_lo + (b_hi - b_lo) / 3
    b2 = b_lo + 2 * (b_hi - b_lo) / 3
    v1 = _line_values(F, G, b1)
    v2 = _line_values(F, G, b2)
    root = ZERO
    for a1, a2 in zip(v1, v2):
        slope = (a2 - a1) / (b2 - b1)
        intercept = a1 - slope * b1
        denom = 1 - slope * g
        if denom <= 0:
            # cannot happen for monotone candidates; fall back to the safe end
            root = max(root, b_hi / g)
            continue
        root = max(root, intercept / denom)
    return min(b_hi / g, max(b_lo / g, root))


def levy_bisect_bracket(
    gamma: Rational, F: Cdf, G: Cdf, tol: Rational = Q(1, 4096)
) -> tuple[Fraction, Fraction]:
    """Independent bracket [lo, hi] around the Levy infimum obtained purely
    from the exact feasibility test; used as a cross-check oracle."""
    g = as_q(gamma)
    lo, hi = ZERO, ONE
    if levy_feasible(g, F, G, lo):
        return lo, lo
    while hi - lo > as_q(tol):
        mid = (lo + hi) / 2
        if levy_feasible(g, F, G, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# -- gauge objects ----------------------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """A local distance at a fixed center: phi-, psi- or Levy-flavoured."""

    kind: BasisKind
    center: Cdf
    alpha: Fraction | None = None  # phi width
    net: FNet | None = None  # psi net
    gamma: Fraction | None = None  # Levy parameter

    def __post_init__(self):
        if self.kind == "phi":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("phi gauge needs alpha > 0")
        elif self.kind == "psi":
            if self.net is None:
                raise ValueError("psi gauge needs a net")
            self.net.validate_for(self.center)
        elif self.kind == "levy":
            if self.gamma is None or self.gamma <= 0:
                raise ValueError("levy gauge needs gamma > 0")
        else:
            raise ValueError(f"unknown gauge kind {self.kind!r}")

    def __call__(self, G: Cdf) -> Fraction:
        if self.kind == "phi":
            return phi(self.center, self.alpha, G)
        if self.kind == "psi":
            return psi(self.center, self.net, G)
        return levy(self.gamma, self.center, G)


@dataclass(frozen=True)
class GaugeSelection:
    """One gauge per center, extensional on the finite centers in play."""

    assignment: Mapping[Cdf, Gauge]

    def __post_init__(self):
        for center, gauge in self.assignment.items():
            if gauge.center != center:
                raise ValueError("gauge not centered at its key")

    def __getitem__(self, center: Cdf) -> Gauge:
        return self.assignment[center]


# -- basis interchange constructions ----------------------------------------


def _sup_alpha_right(F: Cdf, p: Fraction, eps: Fraction):
    """sup{a > 0 : F(p + a) <= F(p) + eps}; returns (value, attained) with
    value None meaning unbounded.  F is linear between consecutive knots,
    so the admissible region ends at a knot or at a linear crossing."""
    level = F.eval(p) + eps
    if level >= 1:
        return None, True
    prev = p
    for k in F.knots():
        if k <= p:
            continue
        if F.eval(k) > level:
            v_lo = F.eval(prev)
            v_hi = F.left_limit(k)
            if v_hi <= level:
                # region reaches k but the jump at k overshoots
                return k - p, False
            d = (v_hi - v_lo) / (k - prev)
            x = prev + (level - v_lo) / d
            return x - p, True
        prev = k
    return None, True


def _sup_alpha_left(F: Cdf, p: Fraction, eps: Fraction):
    """sup{a > 0 : F(p) - left_limit(F, p - a) <= eps}."""
    level = F.eval(p) - eps
    if level <= 0:
        return None, True
    pts = sorted({k for k in F.knots() if k <= p} | {p})
    prev: Fraction | None = None
    for k in pts:
        if F.left_limit(k) >= level:
            if prev is None:
                # left limit at the lowest knot is 0 < level; unreachable
                break
            v_lo = F.eval(prev)
            v_hi = F.left_limit(k)
            if v_lo >= level:
                return p - prev, F.left_limit(prev) >= level
            d = (v_hi - v_lo) / (k - prev)
            s = prev + (level - v_lo) / d
            return p - s, True
        prev = k
    # F(p-) < level <= F(p): p jumps, no positive width admissible; callers
    # only reach this with continuity points, but stay defensive
    return ZERO, False


def alpha_for_net(F: Cdf, net: FNet, eps: Rational) -> Fraction:
    """Width alpha > 0 such that psi(F, net, G) <= phi(F, alpha, G) + eps
    for every G: F varies by at most eps on [p - alpha, p + alpha] around
    each net point.  When the admissible sup is open, half of it is used."""
    e = as_q(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    net.validate_for(F)
    best: Fraction | None = None
    best_attained = True
    for p in net.points:
        for sup, attained in (_sup_alpha_right(F, p, e), _sup_alpha_left(F, p, e)):
            if sup is None:
                continue
            if best is None or sup < best:
                best, best_attained = sup, attained
            elif sup == best:
                best_attained = best_attained and attained
    if best is None:
        return ONE
    alpha = best if best_attained else best / 2
    if not _alpha_admissible(F, net, alpha, e):
        alpha = best / 2
    assert _alpha_admissible(F, net, alpha, e)
    return alpha


def _alpha_admissible(F: Cdf, net: FNet, alpha: Fraction, eps: Fraction) -> bool:
    if alpha <= 0:
        return False
    for p in net.points:
        if F.eval(p + alpha) - F.eval(p) > eps:
            return False
        if F.eval(p) - F.left_limit(p - alpha) > eps:
            return False
    return True


def net_for_alpha(F: Cdf, alpha: Rational, eps: Rational) -> FNet:
    """An F-net x_0 < ... < x_n with F(x_0) <= eps, spacing < alpha and
    F(x_n) >= 1 - eps, so phi(F, alpha, G) <= psi(F, net, G) + eps for all G.

    Grid points landing on a jump are moved right by repeatedly halved
    steps until they clear every jump."""
    a = as_q(alpha)
    e = as_q(eps)
    if a <= 0 or e <= 0:
        raise ValueError("alpha and eps must be positive")
    sup = F.support()
    step = a / 2
    points = []
    x = sup.low - step
    last = sup.high + step
    while True:
        points.append(x)
        if x >= last:
            break
        x = x + step
    jump_locs = F.jump_locations()
    out = []
    for g in points:
        delta = a / 8
        while g in jump_locs:
            g = g + delta
            delta = delta / 2
        out.append(g)
    net = FNet.of(out)
    net.validate_for(F)
    # construction constraints, checked rather than assumed
    assert F.eval(net.points[0]) <= e
    assert F.eval(net.points[-1]) >= 1 - e
    assert all(b - a_ < a for a_, b in zip(net.points, net.points[1:]))
    return net


# -- distance functional delta ----------------------------------------------


def delta_distance_bracket(
    F: Cdf,
    family: Sequence[Cdf],
    basis: BasisKind = "phi",
    depth: int = 64,
) -> tuple[Fraction, Fraction]:
    """Certified bracket for delta(F, family) = sup over basis gauges at F
    of the infimum over the family.

    The sup over the gauge parameter is approached along the canonical
    monotone sequence alpha = gamma = 1/n (nested nets for the psi basis),
    giving the exact lower bound; every basis gauge is dominated by the
    uniform distance, so min over the family of D_u is a valid upper bound.
    """
    if not family:
        raise ValueError("delta_distance needs a nonempty family")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if basis == "phi":
        lower = min(phi(F, Q(1, depth), G) for G in family)
    elif basis == "levy":
        lower = min(levy(Q(1, depth), F, G) for G in family)
    elif basis == "psi":
        net = net_for_alpha(F, Q(1, depth), Q(1, depth + 1))
        lower = min(psi(F, net, G) for G in family)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    upper = min(uniform_distance(F, G) for G in family)
    assert lower <= upper
    return lower, upper


def delta_distance(
    F: Cdf, family: Sequence[Cdf], basis: BasisKind = "phi", depth: int = 64
) -> Fraction:
    """Certified lower value of the delta functional at the given depth."""
    return delta_distance_bracket(F, family, basis, depth)[0]
