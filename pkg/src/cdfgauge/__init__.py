"""Exact distribution-function gauges and quantitative compactness indices."""

from .cdf import (
    Cdf,
    InvalidCdfError,
    SupportBound,
    UnsupportedConvolutionError,
    as_q,
    convolve,
    dirac,
    from_parts,
    mixture,
    shift,
    uniform,
)
from .families import FamilySpec, ParametricTail, SequenceSpec, TemplateError
from .gauges import (
    FNet,
    Gauge,
    GaugeSelection,
    InvalidNetError,
    alpha_for_net,
    delta_distance,
    delta_distance_bracket,
    levy,
    levy_bisect_bracket,
    levy_feasible,
    net_for_alpha,
    phi,
    psi,
    uniform_distance,
)
from .indices import (
    DEFAULT_ALPHA_GRID,
    HellyResult,
    IndexBracket,
    StabilizationError,
    WindowError,
    escape_index,
    eventual_phi,
    helly_select,
    is_tight,
    lambda_exact,
    limit_operator,
    lindelof_witness,
    prokhorov_bracket,
    weak_rsc_flag,
)
from .approach import (
    ApproachAxiomError,
    Ball,
    CdfSpace,
    CdfTemplateSeq,
    FiniteSpace,
    TailConstantSeq,
    Theorem22Report,
    Theorem22ViolationError,
    ball_contains,
    eps_convergent,
    indices_bruteforce,
    limit_operator_generic,
    theorem22_check,
    theorem22_check_cdf,
)

__version__ = "0.1.0"
