import random
from fractions import Fraction as Q

import pytest

from cdfgauge import (
    ApproachAxiomError,
    Ball,
    CdfSpace,
    CdfTemplateSeq,
    DEFAULT_ALPHA_GRID,
    FamilySpec,
    FiniteSpace,
    ParametricTail,
    TailConstantSeq,
    Theorem22ViolationError,
    ball_contains,
    dirac,
    eps_convergent,
    indices_bruteforce,
    limit_operator,
    limit_operator_generic,
    theorem22_check,
    theorem22_check_cdf,
    uniform,
)
from cdfgauge.indices import IndexBracket


def three_point_space(off=Q(1)):
    pts = ("a", "b", "c")
    gauges = {x: ({y: (Q(0) if y == x else off) for y in pts},) for x in pts}
    return FiniteSpace(points=pts, gauges=gauges)


def test_axiom_enforced():
    pts = ("a",)
    with pytest.raises(ApproachAxiomError):
        FiniteSpace(points=pts, gauges={"a": ({"a": Q(1)},)})


def test_balls():
    space = three_point_space()
    (g,) = space.basis("a")
    ball = Ball(center="a", gauge=g, radius=Q(1, 2))
    assert ball_contains(ball, "a")
    assert not ball_contains(ball, "b")
    with pytest.raises(ValueError):
        Ball(center="a", gauge=g, radius=0)


def test_eps_convergent_finite():
    space = three_point_space()
    seq = TailConstantSeq(transient=("b", "c"), tail="a")
    assert eps_convergent(seq, "a", Q(1, 2), 1, space)
    assert not eps_convergent(seq, "b", Q(1, 2), 1, space)
    with pytest.raises(ValueError):
        eps_convergent(seq, "a", 0, 1, space)


def test_generic_limit_operator_matches_dedicated():
    space = CdfSpace(depth=64)
    rngs = [
        ParametricTail(template="mixture-escape", base=dirac(0), a=Q(3, 10), t="n"),
        ParametricTail(template="shift-escape", base=dirac(0), t="1/n"),
        ParametricTail(template="constant", base=uniform(0, 1)),
    ]
    for seq in rngs:
        for F in (dirac(0), uniform(0, 1)):
            generic = limit_operator_generic(
                CdfTemplateSeq(seq), F, DEFAULT_ALPHA_GRID, space
            )
            dedicated = limit_operator(seq, F, DEFAULT_ALPHA_GRID)
            # the generic scan brackets the same operator value
            assert generic.lower <= dedicated.upper
            assert dedicated.lower <= generic.upper


def test_bruteforce_indices():
    rng = random.Random(37)
    for n_pts in (1, 3, 6):
        pts = tuple(f"p{i}" for i in range(n_pts))
        gauges = {}
        for x in pts:
            tables = []
            for _ in range(rng.randint(1, 3)):
                tables.append(
                    {y: (Q(0) if y == x else Q(rng.randint(1, 8), 8)) for y in pts}
                )
            gauges[x] = tuple(tables)
        space = FiniteSpace(points=pts, gauges=gauges)
        assert indices_bruteforce(space, pts, [Q(1, 2), Q(1)]) == (0, 0, 0)
    with pytest.raises(ValueError):
        indices_bruteforce(three_point_space(), ("a",), [])


def test_theorem22_check():
    rsc = IndexBracket(lower=Q(1, 4), upper=Q(1, 4))
    rc = IndexBracket(lower=Q(1, 4), upper=Q(1, 4))
    assert theorem22_check(rsc, rc, Q(1, 100)).ok
    bad_rc = IndexBracket(lower=Q(3, 4), upper=Q(3, 4))
    with pytest.raises(Theorem22ViolationError):
        theorem22_check(rsc, bad_rc, Q(1, 100))


def test_theorem22_check_cdf():
    fam = FamilySpec(
        explicit=(dirac(0),),
        tails=(ParametricTail(template="mixture-escape", base=dirac(0), a=Q(1, 4), t="n"),),
    )
    report = theorem22_check_cdf(fam, Q(1, 100))
    assert report.ok
    assert report.rsc.lower == Q(1, 4)
