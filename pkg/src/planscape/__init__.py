"""Planning-landscape analysis for configurable systems across environments."""

__version__ = "0.1.0"

from .errors import (ArgumentError, DegenerateError, DomainError, FormatError, IncompletenessError,  # noqa: E402
                     ParseError, PlanscapeError)
from .space import (ConfigurationSpace, EnvironmentLandscape, OptionDomain, load_environment,  # noqa: E402
                    load_study, validate_completeness)
from .neighborhood import OptimaClassification, classify_optima, hamming_distance, neighbors  # noqa: E402
from .metrics import (correlation_length, correlation_length_study, distance_field, fdc,  # noqa: E402
                      modality_percentage, project, random_walk)
from .crossenv import distance_groups, optima_overlap  # noqa: E402
from .stats import correlation_diff_test, fisher_z, significance_marker, wilcoxon_rank_sum  # noqa: E402

__all__ = [
    "ArgumentError", "DegenerateError", "DomainError", "FormatError", "IncompletenessError", "ParseError",
    "PlanscapeError", "ConfigurationSpace", "EnvironmentLandscape", "OptionDomain", "load_environment",
    "load_study", "validate_completeness", "OptimaClassification", "classify_optima", "hamming_distance",
    "neighbors", "correlation_length", "correlation_length_study", "distance_field", "fdc",
    "modality_percentage", "project", "random_walk", "distance_groups", "optima_overlap",
    "correlation_diff_test", "fisher_z", "significance_marker", "wilcoxon_rank_sum",
]
