"""
Training-iteration dependence graphs and their multi-processor schedules.
"""

from gradinterleave.schedule.graph import (
    DEFAULT_BATCH,
    DEFAULT_GEOMETRY,
    DEFAULT_LAYER_DIMS,
    build_graph,
    random_dag,
)
from gradinterleave.schedule.scheduler import (
    bottom_levels,
    compare_policies,
    critical_path_length,
    exhaustive_makespan,
    list_schedule,
    timeline_csv,
    timeline_frame,
)

__all__ = [
    "DEFAULT_BATCH",
    "DEFAULT_GEOMETRY",
    "DEFAULT_LAYER_DIMS",
    "bottom_levels",
    "build_graph",
    "compare_policies",
    "critical_path_length",
    "exhaustive_makespan",
    "list_schedule",
    "random_dag",
    "timeline_csv",
    "timeline_frame",
]
