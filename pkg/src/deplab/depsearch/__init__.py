"""Dependent-set search, prediction, classification and normal-vector analysis."""

from .classify import classify_orbits, tag_symmetries
from .predict import predict_sets
from .search import BudgetExceeded, SearchConfig, exhaustive_search
from .sets import DEP_TOL, DependencySet
from .targeted import targeted_search

__all__ = [
    "BudgetExceeded", "DEP_TOL", "DependencySet", "SearchConfig", "classify_orbits",
    "exhaustive_search", "predict_sets", "tag_symmetries", "targeted_search",
]
