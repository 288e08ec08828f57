"""minmeanmax: expression circuits over min, max, difference and
exponent-indexed means, with sorting-network synthesis, negation-free
rewriting, threshold classifiers, and an evolutionary search.

The commonly used names are re-exported here; the unit-interval rewrite
language lives apart in :mod:`minmeanmax.rewrite` because its node
classes intentionally shadow the main expression names.
"""

from .means import Alpha, additive_mean, mean_ordering_check, power_mean
from .expr import (
    Diff,
    Expr,
    HomogeneityDegree,
    Input,
    Max,
    Mean,
    Min,
    Zero,
    children,
    depth,
    evaluate,
    homogeneity_degree,
    iter_nodes,
    size,
    support,
)
from .sexpr import ParseError, format_expr, parse_expr
from .circuits import (
    ComparatorNetwork,
    batcher_bitonic,
    format_network,
    optimal_network_8,
    parse_network,
    quantile_circuit,
    second_largest_depth2,
    verify_sorts,
)
from .classifiers import (
    Classifier,
    ClassifierKind,
    Dataset,
    DatasetMetrics,
    Verdict,
    classify,
    classify_batch,
    decision_value,
    evaluate_on_dataset,
    format_classifier,
    load_classifier,
    load_dataset_csv,
    parse_classifier,
    save_classifier,
    save_dataset_csv,
    volume_invariance_test,
)
from .search import (
    DEFAULT_ALPHA_PALETTE,
    SearchConfig,
    SearchResult,
    crossover,
    default_profiles,
    evolve,
    fit_threshold,
    format_config,
    generate_synthetic,
    mutate,
    parse_config,
    random_expr,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "power_mean",
    "additive_mean",
    "mean_ordering_check",
    "Zero",
    "Input",
    "Min",
    "Max",
    "Diff",
    "Mean",
    "Expr",
    "children",
    "iter_nodes",
    "support",
    "size",
    "depth",
    "HomogeneityDegree",
    "homogeneity_degree",
    "evaluate",
    "ParseError",
    "parse_expr",
    "format_expr",
    "ComparatorNetwork",
    "batcher_bitonic",
    "optimal_network_8",
    "verify_sorts",
    "quantile_circuit",
    "second_largest_depth2",
    "format_network",
    "parse_network",
    "Verdict",
    "ClassifierKind",
    "Classifier",
    "classify",
    "classify_batch",
    "decision_value",
    "Dataset",
    "DatasetMetrics",
    "evaluate_on_dataset",
    "volume_invariance_test",
    "format_classifier",
    "parse_classifier",
    "load_classifier",
    "save_classifier",
    "load_dataset_csv",
    "save_dataset_csv",
    "DEFAULT_ALPHA_PALETTE",
    "SearchConfig",
    "SearchResult",
    "random_expr",
    "mutate",
    "crossover",
    "fit_threshold",
    "evolve",
    "default_profiles",
    "generate_synthetic",
    "parse_config",
    "format_config",
    "__version__",
]
