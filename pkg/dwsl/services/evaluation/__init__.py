"""
Policy rollouts, success metrics and learning curves.
"""

from dwsl.services.evaluation.curves import (
    CURVE_COLUMNS,
    aggregate_reports,
    curves_frame,
    emit_curves,
    read_curves,
)
from dwsl.services.evaluation.rollouts import (
    GOAL_STRATEGIES,
    EpisodeResult,
    EvalReport,
    evaluate,
    rollout,
    sample_eval_goal,
    summarize,
)

__all__ = [
    "CURVE_COLUMNS",
    "GOAL_STRATEGIES",
    "EpisodeResult",
    "EvalReport",
    "aggregate_reports",
    "curves_frame",
    "emit_curves",
    "evaluate",
    "read_curves",
    "rollout",
    "sample_eval_goal",
    "summarize",
]
