"""Trade-off functions and two-row channels for f-differential privacy.

A two-row stochastic matrix (channel) and a convex error trade-off
curve describe the same privacy guarantee; this package moves between
the two representations exactly, composes mechanisms (parallel,
visible/hidden choice, pre/post-processing), decides the refinement
order, and derives end-to-end profiles for purification and Poisson
sub-sampling pipelines.
"""

from .core import (
    Channel2,
    DimensionMismatch,
    DomainError,
    DuplicateLabel,
    FdpError,
    GeneralChannel,
    InvalidTradeoff,
    NegativeEntry,
    NumericPolicy,
    PartialChannel2,
    RowSumError,
    TradeoffFunction,
    ZeroColumn,
    canonical_sort,
    evaluate,
    lr_compare,
    policy,
    set_policy,
    tradeoff_from_points,
    tradeoff_leq,
    validate_channel,
)
from .tradeoff import (
    NoWitness,
    err_of,
    hockey_stick_leq,
    hockey_stick_vulnerability,
    profile_channel,
    tradeoff_channel,
    tradeoff_of,
    witness_for_tradeoff_refinement,
)
from .canonical import (
    CentroidMismatch,
    NotIncomparable,
    channel_of,
    glb2,
    glb_finite,
    refine2x2_check,
    refinement_leq,
    tradeoff_max,
    tradeoff_min,
)
from .compose import (
    hidden_choice,
    parallel,
    parallel_profile_bound,
    postprocess,
    preprocess,
    visible_choice,
    visible_choice_profile,
)
from .mechanisms import (
    EpsDelta,
    NotSymmetric,
    SymmetricDecomposition,
    canonical_eps_delta,
    decomposition_channel,
    eps_delta_tradeoff,
    epsdelta_delta_at,
    pure_dp_extract,
    satisfies_fdp,
    subsample_poisson,
    symmetric_decompose,
    truncated_geometric,
    uniform_channel,
)
from .analyses import (
    EmptySupport,
    amplification_gap,
    purify_profile,
    purify_with_escape,
    subsample_profile,
)
from .oracle import TooLarge, oracle_refinement, oracle_tradeoff
from .pipeline import (
    PipelineSyntaxError,
    PipelineTypeError,
    eval_pipeline,
    format_pipeline,
    load_channel,
    load_tradeoff,
    parse_pipeline,
)

__version__ = "0.1.0"
