"""Counting pattern occurrences in permutations with multiset decision diagrams."""

from .mdd import (
    Mode,
    Multiset,
    NodeBudgetExceeded,
    Universe,
    UniverseMismatch,
    cardinality_sum,
    evaluate,
    from_assignments,
    multiplicity_histogram,
    node_count,
    union,
)
from .perms import PermUniverse, compose_right, cross, from_permutations, perm_elements, singleton
from .pipeline import PatternJob, PsiTable, count, psi_table, wilf_classes

__version__ = "0.1.0"

__all__ = [
    "Mode",
    "Multiset",
    "NodeBudgetExceeded",
    "PatternJob",
    "PermUniverse",
    "PsiTable",
    "Universe",
    "UniverseMismatch",
    "cardinality_sum",
    "compose_right",
    "count",
    "cross",
    "evaluate",
    "from_assignments",
    "from_permutations",
    "multiplicity_histogram",
    "node_count",
    "perm_elements",
    "psi_table",
    "singleton",
    "union",
    "wilf_classes",
]
