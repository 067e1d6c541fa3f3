"""Contingency-table transformations: iterative proportional fitting, which
keeps odds-ratios, and the NM method, which keeps the Liu-Lu sorting
indicator; plus counterfactual decompositions and survey share estimates."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .decompose import (
    DecompositionResult,
    ShareStatistics,
    counterfactual,
    cumulative_preference_path,
    decompose,
    heterogamy_share,
    share_statistics,
)
from .errors import (
    CounterfactualError,
    DegenerateMarginError,
    DimensionError,
    InfeasibleError,
    NegativeAssociationError,
    TableError,
    ZeroCellError,
)
from .indicators import (
    LLMatrix,
    LLValue,
    expected_hh,
    kl_divergence,
    liu_lu,
    liu_lu_generalized,
    odds_ratio,
)
from .ipf import IpfConfig, TransformResult, ipf_fit, ipf_step_cols, ipf_step_rows
from .nm import NmSubproblem, nm_fit, nm_fit_2x2
from .sim import SampleDraw, draw_sample, enumerate_tables, mle_check
from .survey import ProportionEstimate, agresti_coull, normal_quantile
from .tables import (
    AggregationCut,
    ContingencyTable,
    MarginTargets,
    aggregate_2x2,
    margin_ratios,
    margins,
    read_csv,
    validate,
)
