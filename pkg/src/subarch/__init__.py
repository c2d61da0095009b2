"""Toolkit for enumerating, costing and ranking encoder subarchitectures.

The pipeline: enumerate the valid points of an architectural search space,
attach surrogate metrics (closed-form counts or ingested measurements),
scalarize each candidate against a maximum point, and rank. A toy-scale
numeric network cross-checks every closed-form count.
"""

from .costs import (
    CostBreakdown,
    DominanceReport,
    LayerShape,
    cost_breakdown,
    dominance_report,
    embedding_params,
    flop_count,
    flop_oracle,
    linear_flops,
    linear_params,
    param_count,
    shape_list,
    shape_oracle_params,
)
from .engine import (
    CandidateReport,
    ExcludedCandidate,
    ExtractionReport,
    SearchConfig,
    exceed_flags,
    rank_candidates,
    render_json,
    render_text,
    run_extraction,
    w_coefficient,
)
from .errors import ConfigError, DataError, SubarchError, VerificationError
from .metrics import (
    ConstantErrorModel,
    MaxPoint,
    MeasurementRecord,
    MetricTriple,
    SyntheticErrorModel,
    analytic_maxpoint,
    analytic_metrics,
    ingest_measurements,
    maxpoint_from_measurements,
    parse_measurements,
    serialize_measurements,
    synthetic_error,
)
from .space import (
    ArchParams,
    EmbeddingConfig,
    SearchSpace,
    enumerate_space,
    is_valid,
    require_valid,
    stride_subsample,
    validate,
)
from .toynet import (
    ToyNet,
    ToyNetConfig,
    attention,
    count_instantiated_params,
    distillation_loss,
    forward,
    forward_with_stats,
    gelu,
    kd_loss,
    layer_norm,
    softmax,
)

__version__ = "0.1.0"
