"""Exact piecewise representation of cumulative distribution functions.

A CDF is stored as a finite discrete part (jumps) plus a finite union of
uniform-density segments.  All coordinates and masses are rationals, so
every evaluation, shift, mixture and supported convolution is exact.
Suprema taken later (uniform distance, local gauges, Levy metric) reduce
to finite candidate-point scans over the knots recorded here.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

Q = Fraction
Rational = Union[int, Fraction, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class InvalidCdfError(ValueError):
    """A constructor was handed data violating the CDF invariants."""


class UnsupportedConvolutionError(ValueError):
    """Both operands carry continuous parts; the result leaves the
    uniform-density segment class and is not representable exactly."""


def as_q(x: Rational) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidCdfError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InvalidCdfError(f"not a rational: {x!r} (floats are rejected)")


def _eval_parts(jumps, segments, x: Fraction, strict: bool) -> Fraction:
    """Accumulated mass at x; strict=True excludes jumps located at x."""
    total = ZERO
    for loc, mass in jumps:
        if loc < x or (not strict and loc == x):
            total += mass
    for left, right, mass in segments:
        if x >= right:
            total += mass
        elif x > left:
            total += mass * (x - left) / (right - left)
    return total


@dataclass(frozen=True)
class Cdf:
    """A cumulative distribution function with rational jump and segment data.

    ``jumps`` is a strictly increasing tuple of (location, mass) pairs and
    ``segments`` a tuple of disjoint (left, right, mass) uniform-density
    pieces.  Total mass must be exactly 1.  Evaluation is right-continuous.
    """

    jumps: tuple[tuple[Fraction, Fraction], ...]
    segments: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        prev = None
        for loc, mass in self.jumps:
            if mass <= 0:
                raise InvalidCdfError(f"jump mass {mass} at {loc} not positive")
            if prev is not None and loc <= prev:
                raise InvalidCdfError("jump locations not strictly increasing")
            prev = loc
        prev_right = None
        for left, right, mass in self.segments:
            if left >= right:
                raise InvalidCdfError(f"segment [{left}, {right}] degenerate")
            if mass <= 0:
                raise InvalidCdfError("segment mass not positive")
            if prev_right is not None and left < prev_right:
                raise InvalidCdfError("segments overlap")
            prev_right = right
        total = sum(m for _, m in self.jumps) + sum(m for _, _, m in self.segments)
        if total != 1:
            raise InvalidCdfError(f"total mass {total} != 1")

    # -- evaluation ---------------------------------------------------------

    @cached_property
    def _table(self):
        """Per-knot values and inter-knot densities for bisect evaluation."""
        ks = self.knots()
        jump_at = {loc: m for loc, m in self.jumps}
        density = []
        for a, b in zip(ks, ks[1:]):
            d = ZERO
            for l, r, m in self.segments:
                if l <= a and b <= r:
                    d = m / (r - l)
                    break
            density.append(d)
        density.append(ZERO)  # to the right of the last knot
        vals, lefts = [], []
        acc = ZERO
        for i, k in enumerate(ks):
            lefts.append(acc)
            acc += jump_at.get(k, ZERO)
            vals.append(acc)
            if i < len(ks) - 1:
                acc += density[i] * (ks[i + 1] - k)
        return ks, vals, lefts, density

    def eval(self, x: Rational) -> Fraction:
        """F(x), right-continuous: the jump at x counts."""
        xq = as_q(x)
        ks, vals, _, density = self._table
        i = bisect_right(ks, xq) - 1
        if i < 0:
            return ZERO
        return vals[i] + density[i] * (xq - ks[i])

    def left_limit(self, x: Rational) -> Fraction:
        """lim_{y -> x-} F(y): the jump at x does not count."""
        xq = as_q(x)
        ks, vals, lefts, density = self._table
        i = bisect_right(ks, xq) - 1
        if i < 0:
            return ZERO
        if ks[i] == xq:
            return lefts[i]
        return vals[i] + density[i] * (xq - ks[i])

    def __call__(self, x: Rational) -> Fraction:
        return self.eval(x)

    # -- structure ----------------------------------------------------------

    def knots(self) -> tuple[Fraction, ...]:
        """Jump locations and segment endpoints, sorted and deduplicated."""
        pts = {loc for loc, _ in self.jumps}
        for left, right, _ in self.segments:
            pts.add(left)
            pts.add(right)
        return tuple(sorted(pts))

    def jump_locations(self) -> frozenset[Fraction]:
        return frozenset(loc for loc, _ in self.jumps)

    def is_continuous(self) -> bool:
        return not self.jumps

    def is_discrete(self) -> bool:
        return not self.segments

    def support(self) -> "SupportBound":
        ks = self.knots()
        return SupportBound(low=ks[0], high=ks[-1])

    def is_continuity_point(self, x: Rational) -> bool:
        return as_q(x) not in self.jump_locations()


@dataclass(frozen=True)
class SupportBound:
    """Closed window [low, high] outside which F is 0 resp. 1."""

    low: Fraction
    high: Fraction

    def __post_init__(self):
        if self.low > self.high:
            raise InvalidCdfError(f"support bound {self.low} > {self.high}")


def _normalize(jumps, segments) -> Cdf:
    """Merge coincident jumps, split overlapping segments into disjoint
    constant-density pieces, drop zero masses."""
    merged: dict[Fraction, Fraction] = {}
    for loc, mass in jumps:
        if mass < 0:
            raise InvalidCdfError(f"negative jump mass {mass}")
        if mass:
            merged[loc] = merged.get(loc, ZERO) + mass
    jump_out = tuple(sorted((loc, m) for loc, m in merged.items() if m))

    segs = [(l, r, m) for (l, r, m) in segments if m]
    if any(m < 0 for _, _, m in segs):
        raise InvalidCdfError("negative segment mass")
    seg_out: list[tuple[Fraction, Fraction, Fraction]] = []
    if segs:
        cuts = sorted({p for l, r, _ in segs for p in (l, r)})
        for a, b in zip(cuts, cuts[1:]):
            dens = sum(m / (r - l) for l, r, m in segs if l <= a and b <= r)
            if dens:
                if seg_out and seg_out[-1][1] == a:
                    pl, pr, pm = seg_out[-1]
                    if pm / (pr - pl) == dens:
                        seg_out[-1] = (pl, b, pm + dens * (b - a))
                        continue
                seg_out.append((a, b, dens * (b - a)))
    return Cdf(jumps=jump_out, segments=tuple(seg_out))


def from_parts(jumps, segments) -> Cdf:
    """Public normalizing constructor from raw jump/segment iterables."""
    return _normalize(jumps, segments)


# -- constructors -----------------------------------------------------------


def dirac(a: Rational) -> Cdf:
    """Point mass 1 at a."""
    return Cdf(jumps=((as_q(a), ONE),), segments=())


def uniform(a: Rational, b: Rational) -> Cdf:
    """Uniform distribution on [a, b], a < b."""
    aq, bq = as_q(a), as_q(b)
    if aq >= bq:
        raise InvalidCdfError(f"uniform needs a < b, got {aq} >= {bq}")
    return Cdf(jumps=(), segments=((aq, bq, ONE),))


def mixture(weights: Sequence[Rational], parts: Sequence[Cdf]) -> Cdf:
    """Convex combination of CDFs; weights must sum to exactly 1."""
    ws = [as_q(w) for w in weights]
    if len(ws) != len(parts):
        raise InvalidCdfError("weights and parts length mismatch")
    if any(w < 0 for w in ws):
        raise InvalidCdfError("negative mixture weight")
    total = sum(ws, ZERO)
    if total != 1:
        raise InvalidCdfError(f"mixture weights sum to {total}, not 1")
    jumps = []
    segments = []
    for w, part in zip(ws, parts):
        if w == 0:
            continue
        jumps.extend((loc, w * m) for loc, m in part.jumps)
        segments.extend((l, r, w * m) for l, r, m in part.segments)
    return _normalize(jumps, segments)


def shift(F: Cdf, t: Rational) -> Cdf:
    """Translate: result evaluates to F(x - t)."""
    tq = as_q(t)
    if tq == 0:
        return F
    return Cdf(
        jumps=tuple((loc + tq, m) for loc, m in F.jumps),
        segments=tuple((l + tq, r + tq, m) for l, r, m in F.segments),
    )


def rescale_parts(F: Cdf, w: Fraction):
    """Jump/segment lists of F scaled by w; helper for defective limits."""
    jumps = tuple((loc, w * m) for loc, m in F.jumps)
    segments = tuple((l, r, w * m) for l, r, m in F.segments)
    return jumps, segments


def convolve(F: Cdf, G: Cdf) -> Cdf:
    """Convolution product.  Supported exactly when at least one operand is
    purely discrete; segment-segment convolution is rejected because its
    density is piecewise linear, outside this representation."""
    if not F.is_discrete() and not G.is_discrete():
        raise UnsupportedConvolutionError(
            "segment * segment convolution leaves the uniform-density class"
        )
    # put the purely discrete operand second and distribute its atoms
    if not G.is_discrete():
        F, G = G, F
    jumps = []
    segments = []
    for loc, mass in G.jumps:
        jumps.extend((j + loc, mass * m) for j, m in F.jumps)
        segments.extend((l + loc, r + loc, mass * m) for l, r, m in F.segments)
    return _normalize(jumps, segments)


def sub_eval(parts, x: Fraction) -> Fraction:
    """Evaluate a (jumps, segments) pair that need not carry mass 1."""
    jumps, segments = parts
    return _eval_parts(jumps, segments, x, strict=False)


def sub_left_limit(parts, x: Fraction) -> Fraction:
    jumps, segments = parts
    return _eval_parts(jumps, segments, x, strict=True)


def parts_knots(parts) -> tuple[Fraction, ...]:
    jumps, segments = parts
    pts = {loc for loc, _ in jumps}
    for l, r, _ in segments:
        pts.add(l)
        pts.add(r)
    return tuple(sorted(pts))


def parts_mass(parts) -> Fraction:
    jumps, segments = parts
    return sum(m for _, m in jumps) + sum(m for _, _, m in segments)
