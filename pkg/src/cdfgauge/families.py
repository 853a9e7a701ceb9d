"""Template-presented families and sequences of CDFs.

Infinite index sets are restricted to closed-form tail templates so that
suprema over n and pointwise limits are computable exactly:

* ``shift-escape``:   F_n = shift(base, t_n)
* ``mixture-escape``: F_n = (1-a) * base + a * shift(base, t_n)
* ``constant``:       F_n = base

The offset rule t is one of "n", "2n" (strictly increasing, unbounded),
"1/n" (decreasing to 0, shift template only, for sequences approaching a
limit from the right) or an explicit tuple, read as constant past its end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .cdf import (
    Cdf,
    Q,
    Rational,
    ZERO,
    ONE,
    as_q,
    mixture,
    parts_knots,
    parts_mass,
    rescale_parts,
    shift,
    sub_eval,
    sub_left_limit,
)

TSpec = Union[str, tuple[Fraction, ...]]

TEMPLATES = ("shift-escape", "mixture-escape", "constant")


class TemplateError(ValueError):
    """A tail or sequence specification falls outside the template set."""


def _check_t(template: str, t: TSpec) -> TSpec:
    if isinstance(t, str):
        if t not in ("n", "2n", "1/n"):
            raise TemplateError(f"unknown offset rule {t!r}")
        if t == "1/n" and template != "shift-escape":
            raise TemplateError("offset rule '1/n' is only defined for shift tails")
        return t
    ts = tuple(as_q(v) for v in t)
    if not ts:
        raise TemplateError("explicit offset list is empty")
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise TemplateError("explicit offset list not strictly increasing")
    return ts


@dataclass(frozen=True)
class ParametricTail:
    """One closed-form tail (F_n)_n inside a family."""

    template: str
    base: Cdf
    a: Fraction = ZERO
    t: TSpec = "n"
    horizon: int = 128

    def __post_init__(self):
        if self.template not in TEMPLATES:
            raise TemplateError(f"unknown template {self.template!r}")
        object.__setattr__(self, "a", as_q(self.a))
        if not (0 <= self.a <= 1):
            raise TemplateError(f"mixture weight a={self.a} outside [0, 1]")
        if self.template == "mixture-escape" and isinstance(self.t, str) and self.t == "1/n":
            raise TemplateError("mixture tails need increasing offsets")
        object.__setattr__(self, "t", _check_t(self.template, self.t))
        if self.horizon < 1:
            raise TemplateError("horizon must be >= 1")

    # -- members -----------------------------------------------------------

    def t_value(self, n: int) -> Fraction:
        if n < 1:
            raise TemplateError("members are indexed from 1")
        if self.t == "n":
            return Q(n)
        if self.t == "2n":
            return Q(2 * n)
        if self.t == "1/n":
            return Q(1, n)
        return self.t[min(n, len(self.t)) - 1]

    def member(self, n: int) -> Cdf:
        if self.template == "constant":
            return self.base
        moved = shift(self.base, self.t_value(n))
        if self.template == "shift-escape":
            return moved
        if self.a == 0:
            return self.base
        if self.a == 1:
            return moved
        return mixture([1 - self.a, self.a], [self.base, moved])

    def is_escaping(self) -> bool:
        """True when the offsets grow without bound."""
        return self.t in ("n", "2n")

    # -- closed forms ------------------------------------------------------

    def escape_contribution(self, M: Fraction) -> Fraction:
        """sup over n of max{F_n(-M), 1 - F_n(M)}, in closed form."""
        base = self.base
        if self.template == "constant":
            return max(base.eval(-M), 1 - base.eval(M))
        if isinstance(self.t, tuple):
            return max(
                max(self.member(n).eval(-M), 1 - self.member(n).eval(M))
                for n in range(1, len(self.t) + 1)
            )
        if self.t == "1/n":
            # offsets decrease to 0: F_n(-M) increases to base((-M)-),
            # 1 - F_n(M) is largest at n = 1
            return max(base.left_limit(-M), 1 - base.eval(M - self.t_value(1)))
        # unbounded offsets
        if self.template == "shift-escape":
            return ONE
        # mixture: the moving atom group eventually clears every window
        first = self.member(1)
        return max(first.eval(-M), 1 - (1 - self.a) * base.eval(M))

    def limit_parts(self):
        """Right-continuous representation of the pointwise limit, as a
        (jumps, segments) pair of total mass <= 1."""
        if self.template == "constant":
            return rescale_parts(self.base, ONE)
        if isinstance(self.t, tuple):
            return rescale_parts(self.member(len(self.t)), ONE)
        if self.t == "1/n":
            # limit is the left-continuous version of base; the representation
            # differs from it only at base's jumps, which the continuity-point
            # suprema never sample
            return rescale_parts(self.base, ONE)
        if self.template == "shift-escape":
            return ((), ())
        return rescale_parts(self.base, 1 - self.a)

    def pointwise_limit_value(self, x: Rational) -> Fraction:
        """lim over n of F_n(x) at a fixed point, exact."""
        xq = as_q(x)
        if self.t == "1/n":
            return self.base.left_limit(xq)
        return sub_eval(self.limit_parts(), xq)

    def settle_index(self, x: Rational) -> int:
        """First n from which F_m(x) equals the pointwise limit for all
        m >= n; may exceed the horizon when the values never settle."""
        xq = as_q(x)
        if self.template == "constant":
            return 1
        if isinstance(self.t, tuple):
            last = len(self.t)
            target = self.member(last).eval(xq)
            n = last
            while n > 1 and self.member(n - 1).eval(xq) == target:
                n -= 1
            return n
        if self.t == "1/n":
            target = self.base.left_limit(xq)
            for n in range(1, self.horizon + 2):
                if self.base.eval(xq - Q(1, n)) == target:
                    return n
            return self.horizon + 1
        return self.stabilization_index(xq)

    def coordinate_scale(self) -> Fraction:
        """A bound on every coordinate magnitude the tail's geometry uses."""
        ks = self.base.knots()
        bound = max(abs(ks[0]), abs(ks[-1]))
        if isinstance(self.t, tuple):
            bound = max(bound, abs(self.t[0]), abs(self.t[-1]))
        else:
            bound = max(bound, abs(self.t_value(1)))
        return bound

    def stabilization_index(self, coord: Fraction) -> int:
        """Smallest n such that F_m agrees with the pointwise limit on
        (-inf, coord] for all m >= n; escaping templates only."""
        if self.template == "constant" or isinstance(self.t, tuple):
            return 1 if self.template == "constant" else len(self.t)
        if not self.is_escaping():
            raise TemplateError("no stabilization index for '1/n' offsets")
        low = self.base.knots()[0]
        # need t_n > coord - low, strictly
        n = 1
        while self.t_value(n) <= coord - low:
            n += 1
        return n


# sequences share the template machinery verbatim
SequenceSpec = ParametricTail


@dataclass(frozen=True)
class FamilySpec:
    """A family of CDFs: finitely many explicit members plus closed-form
    tails."""

    explicit: tuple[Cdf, ...] = ()
    tails: tuple[ParametricTail, ...] = ()

    def __post_init__(self):
        if not self.explicit and not self.tails:
            raise TemplateError("family must contain at least one member or tail")

    def sample_members(self, per_tail: int = 3) -> list[Cdf]:
        """Explicit members plus the first few members of each tail."""
        out = list(self.explicit)
        for tail in self.tails:
            for n in range(1, per_tail + 1):
                out.append(tail.member(n))
        return out

    def union(self, other: "FamilySpec") -> "FamilySpec":
        return FamilySpec(
            explicit=self.explicit + other.explicit, tails=self.tails + other.tails
        )

    def coordinate_scale(self) -> Fraction:
        bound = ZERO
        for F in self.explicit:
            ks = F.knots()
            bound = max(bound, abs(ks[0]), abs(ks[-1]))
        for tail in self.tails:
            bound = max(bound, tail.coordinate_scale())
        return bound
