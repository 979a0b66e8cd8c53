"""Circular optimal transport (COT) and linear circular optimal transport (LCOT) on S^1 = R/Z."""

from .circle import circ_add, circ_dist, circ_sub, deg_to_turns, wrap, wrap_signed
from .cot import (
    CostSpec,
    MongeMap,
    UnsupportedInverseError,
    cot_cost_at_alpha,
    cot_distance,
    cot_metric,
    cut_cost_profile,
    inverse,
    monge_map,
    oracle_kantorovich,
    solve_alpha,
)
from .lcot import (
    EmbeddedDataset,
    ReferenceMismatchError,
    TangentField,
    barycenter,
    embed,
    embed_general,
    geodesic,
    interpolate_cot,
    interpolate_lcot,
    inverse_embed,
    lcot_distance,
    lcot_metric,
    lcot_norm,
    mean_field,
    pairwise_matrix,
    transport_map,
)
from .measures import (
    UNIFORM,
    DiscreteMeasure,
    GridDensity,
    InvalidMeasureError,
    cdf,
    cdf_cut,
    expectation,
    pushforward,
    quantile,
    rotate,
    to_discrete,
)

__version__ = "0.1.0"
