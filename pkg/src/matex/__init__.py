"""Pattern avoidance in d-dimensional 0-1 matrices.

Exact containment and interval-minor checks, a desk-scale exact solver for
extremal functions, explicit avoiding constructions, and finite checks of
the structural and extremal inequalities they satisfy.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .containment import (
    ContainmentError,
    Embedding,
    IntervalSystem,
    contains,
    contains_interval_minor,
    enumerate_copies,
    find_embedding,
    find_interval_system,
    would_create_copy,
)
from .extremal import Objective, Predicate, SolveError, SolveResult, SolveTask, f, m, solve
from .patterns import (
    Kind,
    PatternError,
    PatternSpec,
    all_ones,
    block_permutation,
    classify,
    corner_construction,
    deletion_construction,
    identity_permutation,
    permutation_from_maps,
    random_permutation,
    tuple_permutation,
)
from .tensor import Tensor01, TensorError, kronecker, loads

__all__ = [
    "ContainmentError",
    "Embedding",
    "IntervalSystem",
    "Kind",
    "Objective",
    "PatternError",
    "PatternSpec",
    "Predicate",
    "SolveError",
    "SolveResult",
    "SolveTask",
    "Tensor01",
    "TensorError",
    "__version__",
    "all_ones",
    "block_permutation",
    "classify",
    "contains",
    "contains_interval_minor",
    "corner_construction",
    "deletion_construction",
    "enumerate_copies",
    "f",
    "find_embedding",
    "find_interval_system",
    "identity_permutation",
    "kronecker",
    "loads",
    "m",
    "permutation_from_maps",
    "random_permutation",
    "solve",
    "tuple_permutation",
    "would_create_copy",
]
