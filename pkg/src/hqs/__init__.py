"""Hierarchy Quality for Search: label-free scoring of hierarchical clusterings.

A simulated bot searches the hierarchy for each item, descending by a
similarity-driven softmax and stopping greedily; the hierarchy's score is
the mean expected reward of those searches.
"""
from .corpus import Catalogue, build_average_link_hierarchy, build_tfidf, centroid, load_items
from .guidance import SimilarityKind, TemperatureSchedule, guidance, similarity
from .hierarchy import Hierarchy, HierarchyError, load_hierarchy, parse_hierarchy
from .kernels import BACKEND
from .metrics import Evaluator, HaiResult, HqsReport, hai, hqs, sampled_hqs
from .planner import SearchTrace, expand, run_simplified_rtbss
from .pomdp import Action, Belief, PomdpConfig, reward

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BACKEND",
    "Belief",
    "Catalogue",
    "Evaluator",
    "HaiResult",
    "Hierarchy",
    "HierarchyError",
    "HqsReport",
    "PomdpConfig",
    "SearchTrace",
    "SimilarityKind",
    "TemperatureSchedule",
    "build_average_link_hierarchy",
    "build_tfidf",
    "centroid",
    "expand",
    "guidance",
    "hai",
    "hqs",
    "load_hierarchy",
    "load_items",
    "parse_hierarchy",
    "reward",
    "run_simplified_rtbss",
    "sampled_hqs",
    "similarity",
]
