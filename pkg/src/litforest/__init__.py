"""Literature-informed pretraining of random forests.

Pools published per-group summary statistics into class-conditional
multivariate normal distributions, simulates labeled cohorts from them,
trains hybrid forests that mix simulation-pretrained and real-data
fine-tuned trees, and evaluates everything under Monte Carlo cross-
validation with the corrected resampled t-test.
"""

__version__ = "0.1.0"

from .cohort import (
    SimulatedCohort,
    cholesky_lower,
    extend_all_features,
    nearest_psd,
    sample_mvnd,
    simulate_cohort,
)
from .evaluation import (
    ApproachSpec,
    ComparisonResult,
    MccvReport,
    MetricsRecord,
    RunConfig,
    auroc,
    balanced_accuracy,
    compare_best,
    confusion,
    corrected_resampled_ttest,
    mccv_run,
    sensitivity,
    specificity,
)
from .evidence import (
    ClassDistribution,
    EvidenceSet,
    PooledMoment,
    StudyCorrelation,
    StudyMoment,
    build_class_distribution,
    load_evidence,
    pool_correlation,
    pool_moments,
    subset_evidence,
)
from .forest import (
    DecisionTree,
    ForestParams,
    HybridForest,
    classify,
    default_grid,
    fit_forest,
    fit_hybrid,
    fit_tree,
    grid_search,
    predict_proba,
    serialize_forest,
    split_tree_counts,
)
from .preprocess import (
    FeatureSchema,
    Imputer,
    OutcomeSpec,
    SchemaColumn,
    TabularDataset,
    apply_imputer,
    fit_imputer,
    label_remission,
    label_response,
    one_hot_encode,
    smotenc_balance,
)

__all__ = [
    "__version__",
    "ApproachSpec",
    "ClassDistribution",
    "ComparisonResult",
    "DecisionTree",
    "EvidenceSet",
    "FeatureSchema",
    "ForestParams",
    "HybridForest",
    "Imputer",
    "MccvReport",
    "MetricsRecord",
    "OutcomeSpec",
    "PooledMoment",
    "RunConfig",
    "SchemaColumn",
    "SimulatedCohort",
    "StudyCorrelation",
    "StudyMoment",
    "TabularDataset",
    "apply_imputer",
    "auroc",
    "balanced_accuracy",
    "build_class_distribution",
    "cholesky_lower",
    "classify",
    "compare_best",
    "confusion",
    "corrected_resampled_ttest",
    "default_grid",
    "extend_all_features",
    "fit_forest",
    "fit_hybrid",
    "fit_imputer",
    "fit_tree",
    "grid_search",
    "label_remission",
    "label_response",
    "load_evidence",
    "mccv_run",
    "nearest_psd",
    "one_hot_encode",
    "pool_correlation",
    "pool_moments",
    "predict_proba",
    "sample_mvnd",
    "sensitivity",
    "serialize_forest",
    "simulate_cohort",
    "smotenc_balance",
    "specificity",
    "split_tree_counts",
    "subset_evidence",
]
