"""Exact branch statistics of repeated measurements without collapse."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BranchClass,
    BranchEnsemble,
    OutcomeDistribution,
    class_multiplicity,
    class_weight,
    enumerate_classes,
    validate_distribution,
)

__all__ = [
    "BranchClass",
    "BranchEnsemble",
    "OutcomeDistribution",
    "class_multiplicity",
    "class_weight",
    "enumerate_classes",
    "validate_distribution",
]
