"""
Learning curves and seed aggregation.
"""

from pathlib import Path
from typing import Dict, Sequence, Tuple

import pandas as pd

from dwsl.services.evaluation.rollouts import EvalReport
from dwsl.utils.errors import DatasetFormatError

CURVE_COLUMNS = [
    "step",
    "success_rate",
    "mean_steps_at_goal",
    "mean_first_hit",
    "fallback_count",
]
METRICS = ["success_rate", "mean_steps_at_goal", "mean_first_hit", "fallback_count"]


def curves_frame(history: Sequence[Tuple[int, EvalReport]]) -> pd.DataFrame:
    rows = [
        {
            "step": step,
            "success_rate": report.success_rate,
            "mean_steps_at_goal": report.mean_steps_at_goal,
            "mean_first_hit": report.mean_first_hit,
            "fallback_count": report.fallback_count,
        }
        for step, report in history
    ]
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)


def emit_curves(history: Sequence[Tuple[int, EvalReport]], path: Path) -> Path:
    """
    Write (train_step, EvalReport) points as CSV with a header row.

    Floats are written at full precision so the file parses back exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    curves_frame(history).to_csv(path, index=False, lineterminator="\n")
    return path


def read_curves(path: Path) -> pd.DataFrame:
    """Read a curve file, checking its header and numeric content."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except pd.errors.EmptyDataError as e:
        raise DatasetFormatError("empty curve file", line=1) from e
    except pd.errors.ParserError as e:
        raise DatasetFormatError(f"malformed curve file: {e}") from e
    except UnicodeDecodeError as e:
        raise DatasetFormatError(f"curve file is not UTF-8 ({e.reason})") from e
    if list(frame.columns) != CURVE_COLUMNS:
        raise DatasetFormatError(
            f"curve header {list(frame.columns)} != {CURVE_COLUMNS}", line=1
        )
    for column in CURVE_COLUMNS:
        numeric = pd.to_numeric(frame[column], errors="coerce")
        bad = numeric.isna() & frame[column].notna()
        if bad.any():
            raise DatasetFormatError(
                f"non-numeric {column} value", line=int(bad.to_numpy().argmax()) + 2
            )
        frame[column] = numeric
    return frame


def aggregate_reports(reports: Sequence[EvalReport]) -> Dict[str, Dict[str, float]]:
    """Seed-averaged mean and (population) standard deviation of every metric."""
    frame = pd.DataFrame([{m: getattr(r, m) for m in METRICS} for r in reports])
    return {
        metric: {
            "mean": float(frame[metric].mean()),
            "std": float(frame[metric].std(ddof=0)),
        }
        for metric in METRICS
    }
