"""Bootstrap percolation on [n]^d x [k]^ell: closure dynamics, spans,
crossing events, the threshold-constant integral, and seeded Monte Carlo.
"""

from .structures import (
    PLAIN,
    STAR,
    SLAB,
    CellSet,
    Coord,
    DomainError,
    Rectangle,
    StructureSpec,
    bounding_rectangle,
    components,
    diameter,
    neighbors,
    projection,
    threshold,
)
from .dynamics import (
    BOTTOM_TO_TOP,
    LEFT_TO_RIGHT,
    RIGHT_TO_LEFT,
    TOP_TO_BOTTOM,
    CrossDirection,
    closure,
    closure_uniform,
    has_double_gap,
    is_crossed,
    is_semi_crossed,
    percolates,
    semi_percolates,
)
from .span import (
    SpanResult,
    find_spanned_component,
    find_spanned_rectangle,
    internally_spans,
    span_direct,
    span_main_algorithm,
)
from .analytic import (
    DEFAULT_SETTINGS,
    ConvergenceError,
    QuadratureSettings,
    beta,
    g,
    l_exact,
    lambda_constant,
    lambda_table,
    q_of_p,
)
from .montecarlo import (
    CROSSED,
    LONG_SPAN,
    PERCOLATES,
    SEMI_CROSSED,
    SEMI_PERCOLATES,
    SPANS,
    SWEEP_COLUMNS,
    Estimate,
    EventSpec,
    SweepConfig,
    SweepPoint,
    derive_seed,
    estimate_event_prob,
    estimate_lgap,
    estimate_p_alpha,
    run_sweep,
    sample_bin,
    trial_rng,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "PLAIN", "STAR", "SLAB",
    "CellSet", "Coord", "DomainError", "Rectangle", "StructureSpec",
    "bounding_rectangle", "components", "diameter", "neighbors",
    "projection", "threshold",
    "CrossDirection", "LEFT_TO_RIGHT", "RIGHT_TO_LEFT",
    "BOTTOM_TO_TOP", "TOP_TO_BOTTOM",
    "closure", "closure_uniform", "has_double_gap", "is_crossed",
    "is_semi_crossed", "percolates", "semi_percolates",
    "SpanResult", "find_spanned_component", "find_spanned_rectangle",
    "internally_spans", "span_direct", "span_main_algorithm",
    "ConvergenceError", "QuadratureSettings", "DEFAULT_SETTINGS",
    "beta", "g", "l_exact", "lambda_constant", "lambda_table", "q_of_p",
    "PERCOLATES", "SEMI_PERCOLATES", "SPANS", "CROSSED", "SEMI_CROSSED",
    "LONG_SPAN", "SWEEP_COLUMNS",
    "Estimate", "EventSpec", "SweepConfig", "SweepPoint",
    "derive_seed", "estimate_event_prob", "estimate_lgap",
    "estimate_p_alpha", "run_sweep", "sample_bin", "trial_rng",
    "wilson_interval",
]
