"""Shared seeded generators for the exact property tests.

Random discrete CDFs place their atoms on the quarter-integer lattice in
[-3, 3].  The minimum knot gap of 1/4 makes both gauge bases stabilize at
grid depth 64 (widths below the gap no longer cross any knot), so basis
comparisons can be asserted exactly.
"""

import random
from fractions import Fraction as Q

from cdfgauge import Cdf

LATTICE = [Q(i, 4) for i in range(-12, 13)]
OFF_LATTICE = [Q(i, 4) + Q(1, 8) for i in range(-13, 13)]  # never a jump site


def random_discrete(rng: random.Random, max_atoms: int = 5) -> Cdf:
    k = rng.randint(1, max_atoms)
    locs = rng.sample(LATTICE, k)
    weights = [rng.randint(1, 8) for _ in range(k)]
    total = sum(weights)
    jumps = tuple(sorted((loc, Q(w, total)) for loc, w in zip(locs, weights)))
    return Cdf(jumps=jumps, segments=())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Emit the acceptance criteria verdict lines after the run."""
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.VERDICTS:
        terminalreporter.write_line("")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)


def random_mixed(rng: random.Random) -> Cdf:
    """Atoms plus at most one uniform segment, all on the lattice."""
    F = random_discrete(rng, max_atoms=3)
    if rng.random() < Q(1, 2):
        return F
    i = rng.randint(0, len(LATTICE) - 2)
    l, r = LATTICE[i], LATTICE[i + rng.randint(1, len(LATTICE) - 1 - i)]
    w = Q(rng.randint(1, 3), 4)
    jumps = tuple((loc, (1 - w) * m) for loc, m in F.jumps)
    return Cdf(jumps=jumps, segments=((l, r, w),))
