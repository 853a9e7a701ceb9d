import random
from fractions import Fraction as Q

import pytest

from cdfgauge import (
    DEFAULT_ALPHA_GRID,
    FamilySpec,
    ParametricTail,
    StabilizationError,
    WindowError,
    dirac,
    escape_index,
    eventual_phi,
    helly_select,
    is_tight,
    lambda_exact,
    limit_operator,
    lindelof_witness,
    mixture,
    phi,
    prokhorov_bracket,
    uniform,
    weak_rsc_flag,
)
from cdfgauge.cdf import SupportBound
from cdfgauge.indices import _window_for
from conftest import random_discrete


def mixture_family(a):
    tail = ParametricTail(template="mixture-escape", base=dirac(0), a=a, t="n")
    return FamilySpec(tails=(tail,))


def test_escape_index_values():
    assert escape_index(mixture_family(Q(3, 10))) == Q(3, 10)
    shift_fam = FamilySpec(tails=(ParametricTail(template="shift-escape", base=dirac(0), t="n"),))
    assert escape_index(shift_fam) == 1
    tight = FamilySpec(explicit=(dirac(0), uniform(-2, 3)))
    assert escape_index(tight) == 0
    assert is_tight(tight) and not is_tight(shift_fam)


def test_eventual_phi_rules():
    base = dirac(0)
    const = ParametricTail(template="constant", base=base)
    assert eventual_phi(const, dirac(1), Q(1, 2)) == phi(dirac(1), Q(1, 2), base)
    esc = ParametricTail(template="shift-escape", base=base, t="n")
    assert eventual_phi(esc, dirac(0), Q(1, 2)) == 1  # mass gone past every window
    back = ParametricTail(template="shift-escape", base=base, t="1/n")
    assert eventual_phi(back, dirac(0), Q(1, 2)) == 0
    expl = ParametricTail(template="shift-escape", base=base, t=(Q(1), Q(2)))
    assert eventual_phi(expl, dirac(2), Q(1, 2)) == 0
    with pytest.raises(ValueError):
        eventual_phi(const, base, 0)


def test_eventual_phi_one_over_n_matches_deep_members():
    # closed-form t -> 0+ limit agrees with far members of the sequence
    rng = random.Random(31)
    for _ in range(15):
        base = random_discrete(rng)
        F = random_discrete(rng)
        back = ParametricTail(template="shift-escape", base=base, t="1/n")
        b = Q(rng.randint(1, 8), 8)
        limit = eventual_phi(back, F, b)
        deep = phi(F, b, back.member(10**9))
        assert limit == deep
        assert phi(F, b, back.member(10**9 + 1)) == deep


def test_lambda_exact():
    back = ParametricTail(template="shift-escape", base=dirac(0), t="1/n")
    assert lambda_exact(back, dirac(0)) == 0
    assert lambda_exact(back, dirac(1)) == 1
    esc = ParametricTail(template="shift-escape", base=dirac(0), t="n")
    assert lambda_exact(esc, dirac(0)) == 1  # defective limit: all mass escapes


def test_limit_operator_brackets():
    back = ParametricTail(template="shift-escape", base=dirac(0), t="1/n")
    br = limit_operator(back, dirac(0), DEFAULT_ALPHA_GRID)
    assert (br.lower, br.upper) == (0, 0)
    mix = mixture_family(Q(3, 10)).tails[0]
    gtilde = helly_select(mix, _window_for(mix, Q(1, 100)), Q(1, 4), Q(1, 100)).limit
    br = limit_operator(mix, gtilde, DEFAULT_ALPHA_GRID)
    assert (br.lower, br.upper) == (Q(3, 10), Q(3, 10))
    with pytest.raises(ValueError):
        limit_operator(back, dirac(0), [])


def test_helly_select_windows():
    mix = mixture_family(Q(3, 10)).tails[0]
    res = helly_select(mix, SupportBound(low=-2, high=2), Q(1, 4), Q(1, 100))
    assert res.limit.jumps == ((Q(0), Q(7, 10)), (Q(2), Q(3, 10)))
    assert res.lambda_bound == Q(3, 10)
    assert all(b == a + 1 for a, b in zip(res.selector, res.selector[1:]))
    with pytest.raises(WindowError):
        helly_select(mix, SupportBound(low=-1, high=2), Q(1, 4), Q(1, 100))
    tight = ParametricTail(template="constant", base=mixture([Q(1, 2), Q(1, 2)], [dirac(0), dirac(4)]))
    with pytest.raises(WindowError):
        # window misses the atom at 4 by more than eps
        helly_select(tight, SupportBound(low=-1, high=1), Q(1, 4), Q(1, 100))


def test_helly_select_stabilization_error():
    back = ParametricTail(template="shift-escape", base=dirac(0), t="1/n", horizon=128)
    with pytest.raises(StabilizationError) as exc:
        # the grid hits 1/1000 where the members settle only at n = 1000
        helly_select(back, SupportBound(low=-1, high=1), Q(1, 1000), Q(1, 100))
    assert exc.value.horizon == 128


def test_prokhorov_bracket_and_flag():
    for a in (Q(1, 4), Q(3, 10), Q(9, 10)):
        br = prokhorov_bracket(mixture_family(a), Q(1, 100))
        assert br.lower == a
        assert br.lower <= br.upper <= br.lower + Q(1, 100)
    tight = FamilySpec(explicit=(dirac(0), uniform(-1, 1)))
    br = prokhorov_bracket(tight, Q(1, 100))
    assert br.lower == 0 and br.upper <= Q(1, 100)
    assert weak_rsc_flag(tight, Q(1, 100))
    assert not weak_rsc_flag(mixture_family(Q(3, 10)), Q(1, 100))


def test_lindelof_witness():
    members = [dirac(0), dirac(0), uniform(0, 1), mixture([Q(1, 2), Q(1, 2)], [dirac(0), dirac(2)])]
    covers = lindelof_witness(members, Q(1, 100))
    assert covers  # and every member is inside some cover's phi-ball
    for F in members:
        assert any(phi(C, Q(1, 200), F) < Q(1, 100) for C in covers)
    assert len(covers) < len(members)  # the duplicate reuses its cover
    with pytest.raises(ValueError):
        lindelof_witness(members, 0)
