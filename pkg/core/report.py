"""
Functions for combining input and output seminorms into ratio reports
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import pandas as pd

from utils.logger_config import logger

REPORT_COLUMNS = ['experiment', 'test_id', 'depth', 'input_seminorm', 'output_seminorm', 'ratio', 'verdict']
# Inputs at or below this size carry no ratio
INPUT_FLOOR = 1e-12
STABILITY_TOLERANCE = 0.30


@dataclass(frozen=True)
class RatioRow:
    experiment: str
    test_id: str
    depth: int
    input_seminorm: float
    output_seminorm: float
    ratio: float
    verdict: str


@dataclass(frozen=True)
class RatioReport:
    """Per-test rows, per-depth maxima and experiment-level verdict flags"""
    experiment: str
    rows: Tuple[RatioRow, ...]
    depth_summary: Dict[int, float]
    verdicts: Dict[str, bool]
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        finite = [r.ratio for r in self.rows if math.isfinite(r.ratio)]
        return max(finite) if finite else math.nan

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.__dict__ for r in self.rows], columns=REPORT_COLUMNS)


def combine_ratio(experiment: str, test_id: str, depth: int,
                  input_value: float, output_value: float) -> RatioRow:
    """
    Combine an input and an output seminorm into one report row

    Args:
        experiment: Experiment name
        test_id: Test function identifier
        depth: Dyadic depth (or band index) of the estimates
        input_value: Input seminorm
        output_value: Output seminorm

    Returns:
        RatioRow; the ratio is NaN when the input is below INPUT_FLOOR
    """
    if input_value > INPUT_FLOOR:
        ratio = output_value / input_value
        verdict = 'finite' if math.isfinite(ratio) else 'infinite'
    else:
        ratio = math.nan
        verdict = 'zero-input'
    return RatioRow(experiment, test_id, int(depth), float(input_value), float(output_value), ratio, verdict)


def summarize_depths(rows: Iterable[RatioRow]) -> Dict[int, float]:
    """Maximum finite ratio per depth, in increasing depth order"""
    summary: Dict[int, float] = {}
    for row in rows:
        if math.isfinite(row.ratio):
            summary[row.depth] = max(summary.get(row.depth, 0.0), row.ratio)
    return dict(sorted(summary.items()))


def relative_spread(values: Sequence[float]) -> float:
    """max/min - 1 of positive values (0 for fewer than two values)"""
    values = [v for v in values if math.isfinite(v) and v > 0]
    if len(values) < 2:
        return 0.0
    return max(values) / min(values) - 1.0


def is_stable(values: Sequence[float], tolerance: float = STABILITY_TOLERANCE) -> bool:
    return relative_spread(values) <= tolerance


def validate_rows(rows: List[RatioRow], experiment: str) -> bool:
    """
    Validate report rows before saving

    Args:
        rows: Report rows
        experiment: Experiment name for logging

    Returns:
        bool: True if every row is well-formed
    """
    if not rows:
        logger.error(f"Empty {experiment} report")
        return False

    for i, row in enumerate(rows):
        if row.input_seminorm < 0 or row.output_seminorm < 0:
            logger.error(f"{experiment} row {i} ({row.test_id}) has a negative seminorm")
            return False
        if row.input_seminorm > INPUT_FLOOR and not math.isclose(
                row.ratio, row.output_seminorm / row.input_seminorm, rel_tol=1e-12):
            logger.error(f"{experiment} row {i} ({row.test_id}) ratio is inconsistent")
            return False

    logger.debug(f"{experiment} report rows validated")
    return True


def build_report(experiment: str, rows: List[RatioRow], verdicts: Dict[str, bool],
                 details: Dict[str, Any] = None) -> RatioReport:
    report = RatioReport(experiment, tuple(rows), summarize_depths(rows), dict(verdicts), details or {})
    logger.info(f"{experiment}: {len(rows)} rows, max ratio {report.max_ratio:.6g}, verdicts {report.verdicts}")
    return report
