"""Binary-entropy calculus, Hamming-space extremal combinatorics, and chunked
bit-sequence dimension surgery."""

from .bitseq import BitSequence, gen_bernoulli, gen_coin, gen_join_dup, gen_zero_padded
from .dimension import (
    ChunkSchedule,
    chunk_boundary,
    estimate_chunk_dim,
    sequence_dim,
    sequence_distance,
)
from .duplication import DuplicationDescription, duplication_decode, duplication_encode
from .entropy import (
    CASE1,
    CASE2,
    BoundCurves,
    ConvexityReport,
    LineFn,
    ScheduleError,
    bound_curves,
    buffer_schedule,
    case_select,
    chord_line,
    drop_profile,
    entropy,
    entropy_deriv,
    entropy_inv,
    raise_profile,
    tangent_line,
    uplift_gap,
    verify_concavity_lemma,
    verify_convexity_lemma,
)
from .estimators import BernoulliOracle, BlockEntropy, Compressor, EstimatorError, parse_estimator
from .hamming import (
    Codebook,
    SphereDescriptor,
    ball_volume,
    best_subcode,
    brute_force_set_distance,
    check_volume_entropy_bounds,
    greedy_cover,
    harper_far_count,
    opposite_sphere_distance,
    random_cover,
    sphere_for_size,
    verify_harper,
)
from .surgery import (
    PlanEntry,
    SurgeryPlan,
    SurgeryReport,
    apply_plan,
    build_tight_pair,
    lower_chunk,
    plan_lower,
    plan_raise,
    plan_randomize,
    plan_weak_srandom,
    raise_chunk,
)

__version__ = "0.1.0"
