"""Distance-k algorithms on top of half-radius broadcast and convergecast."""

from ..oracle import count_value_khop
from .aggregation import AggregationSpec, count_spec, max_spec, or_spec, support_fold
from .coloring import (
    FastKResult,
    PowerColoring,
    PowerTransport,
    agk_coloring_run,
    agk_reduce,
    dp_bound,
    fastcolor_k_run,
    linialk_overcount_run,
)
from .mis import MisResult, mis_k_run
from .transform import (
    PowerContext,
    bfs_preprocess_k,
    exact_count_convergecast,
    khalf_broadcast,
    khalf_convergecast,
    naive_transform_round,
    transform_round,
)

__all__ = [
    "AggregationSpec",
    "FastKResult",
    "MisResult",
    "PowerColoring",
    "PowerContext",
    "PowerTransport",
    "agk_coloring_run",
    "agk_reduce",
    "bfs_preprocess_k",
    "count_spec",
    "count_value_khop",
    "dp_bound",
    "exact_count_convergecast",
    "fastcolor_k_run",
    "khalf_broadcast",
    "khalf_convergecast",
    "linialk_overcount_run",
    "max_spec",
    "mis_k_run",
    "naive_transform_round",
    "or_spec",
    "support_fold",
    "transform_round",
]
