"""Clustering of storm-event discharge/concentration series.

The package preprocesses bivariate hydrological event series, compares
them with window-constrained dynamic time warping, groups them with
K-medoids, and provides model-selection and evaluation statistics plus
a labeled synthetic event generator for end-to-end validation.
"""

from .distance import (
    DistanceMatrix,
    DtwConfig,
    distance_matrix,
    dtw_dependent,
    dtw_independent,
    euclidean,
    save_distance_matrix,
)
from .errors import ParseError, SchemaError, StormclustError, ValidationError
from .evaluation import (
    AnovaResult,
    ContingencyTable,
    ZScoreProfile,
    anova_oneway,
    attach_clusters,
    chi_squared_independence,
    homogeneity_completeness,
    rand_index,
    zscore_profiles,
)
from .events import (
    METRIC_NAMES,
    Dataset,
    EventMetricsTable,
    ProcessedEvent,
    RawEvent,
    load_clustering,
    load_events,
    load_metrics,
    save_clustering,
    save_events,
    save_metrics,
)
from .kmedoids import Clustering, kmedoids, kmedoids_restarts
from .model_selection import (
    ElbowCurve,
    elbow_curve,
    find_knee,
    hopkins_from_vectors,
    hopkins_statistic,
)
from .preprocess import (
    PreprocessConfig,
    SmoothingConfig,
    normalize_unit,
    preprocess_dataset,
    preprocess_event,
    resample_spline,
    savitzky_golay,
)
from .special import betainc, chi2_sf, f_sf, gammainc_lower, gammainc_upper
from .synthetic import (
    CONCENTRATION_TYPES,
    HYDROGRAPH_TYPES,
    ShapeParams,
    SynthConfig,
    SynthLabel,
    generate_dataset,
    shape_curve,
)

__version__ = "0.1.0"

__all__ = [
    "AnovaResult",
    "CONCENTRATION_TYPES",
    "Clustering",
    "ContingencyTable",
    "Dataset",
    "DistanceMatrix",
    "DtwConfig",
    "ElbowCurve",
    "EventMetricsTable",
    "HYDROGRAPH_TYPES",
    "METRIC_NAMES",
    "ParseError",
    "PreprocessConfig",
    "ProcessedEvent",
    "RawEvent",
    "SchemaError",
    "ShapeParams",
    "SmoothingConfig",
    "StormclustError",
    "SynthConfig",
    "SynthLabel",
    "ValidationError",
    "ZScoreProfile",
    "anova_oneway",
    "attach_clusters",
    "betainc",
    "chi2_sf",
    "chi_squared_independence",
    "distance_matrix",
    "dtw_dependent",
    "dtw_independent",
    "elbow_curve",
    "euclidean",
    "f_sf",
    "find_knee",
    "gammainc_lower",
    "gammainc_upper",
    "generate_dataset",
    "homogeneity_completeness",
    "hopkins_from_vectors",
    "hopkins_statistic",
    "kmedoids",
    "kmedoids_restarts",
    "load_clustering",
    "load_events",
    "load_metrics",
    "normalize_unit",
    "preprocess_dataset",
    "preprocess_event",
    "rand_index",
    "resample_spline",
    "save_clustering",
    "save_distance_matrix",
    "save_events",
    "save_metrics",
    "savitzky_golay",
    "shape_curve",
    "zscore_profiles",
]
