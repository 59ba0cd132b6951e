"""
Functions for saving experiment results
"""
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import geopandas as gpd
import pandas as pd

from utils.logger_config import logger
from .geometry import Square
from .report import RatioReport
from .seminorms import SeminormEstimate

SEMINORM_COLUMNS = ['scale', 'sup_at_scale', 'argmax_cx', 'argmax_cy']


def generate_output_path(output: Union[str, Path], suffix: str, extension: str) -> Path:
    """
    Sibling file of the main output

    Args:
        output: Main output path (e.g. ratios.csv)
        suffix: Suffix added to the stem
        extension: New extension including the dot

    Returns:
        Path such as ratios.summary.json
    """
    output = Path(output)
    return output.with_name(f"{output.stem}{suffix}{extension}")


def save_ratio_report_csv(report: RatioReport, output_file: Union[str, Path]) -> Path:
    """
    Save report rows as CSV

    Args:
        report: Ratio report
        output_file: Output CSV path

    Returns:
        Path of the written file
    """
    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    report.to_frame().to_csv(output_file, index=False, float_format='%.12g', na_rep='nan')
    logger.info(f"Results saved to: {output_file}")
    return output_file


def save_seminorm_csv(estimate: SeminormEstimate, output_file: Union[str, Path]) -> Path:
    """Save a per-scale seminorm profile as CSV"""
    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(estimate.rows(), columns=SEMINORM_COLUMNS).to_csv(output_file, index=False, float_format='%.12g')
    logger.info(f"Seminorm profile saved to: {output_file}")
    return output_file


def save_argmax_geojson(squares: Sequence[Tuple[str, Square]], output_file: Union[str, Path]) -> bool:
    """
    Save maximizing squares as GeoJSON polygons in plane coordinates

    Args:
        squares: (test_id, square) pairs
        output_file: Output GeoJSON path

    Returns:
        bool: Success status
    """
    if not squares:
        logger.warning(f"No squares to save for {output_file}")
        return False
    try:
        output_file = Path(output_file)
        output_file.parent.mkdir(parents=True, exist_ok=True)
        gdf = gpd.GeoDataFrame(
            {
                'test_id': [t for t, _ in squares],
                'side': [q.side for _, q in squares],
            },
            geometry=[q.to_polygon() for _, q in squares],
        )
        gdf.to_file(output_file, driver='GeoJSON')
        logger.info(f"Argmax squares saved to: {output_file}")
        return True
    except Exception as e:
        logger.error(f"Error saving argmax squares to {output_file}: {e}")
        return False


def _json_ready(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def create_run_summary(report: RatioReport, config: Dict[str, Any], output: Union[str, Path]) -> bool:
    """
    Create a summary file of an experiment run

    Args:
        report: Ratio report
        config: Config dictionary the run used
        output: Main output path; the summary goes next to it

    Returns:
        bool: Success status
    """
    try:
        tests = sorted({r.test_id for r in report.rows})
        summary = {
            'run_summary': {
                'experiment': report.experiment,
                'total_tests': len(tests),
                'total_rows': len(report.rows),
                'max_ratio': report.max_ratio,
                'depth_summary': report.depth_summary,
                'verdicts': report.verdicts,
            },
            'config': config,
        }
        summary_file = generate_output_path(output, '.summary', '.json')
        with open(summary_file, 'w', encoding='utf-8') as f:
            json.dump(_json_ready(summary), f, indent=2, ensure_ascii=False)
        logger.info(f"Run summary saved to: {summary_file}")
        return True
    except Exception as e:
        logger.error(f"Error saving run summary: {e}")
        return False


def save_experiment_results(report: RatioReport, config: Dict[str, Any], output: Union[str, Path]) -> List[Path]:
    """
    Save the ratio CSV, the run summary and, when present, the argmax squares

    Returns:
        Paths of the written files
    """
    written = [save_ratio_report_csv(report, output)]
    if create_run_summary(report, config, output):
        written.append(generate_output_path(output, '.summary', '.json'))
    squares = report.details.get('argmax_squares')
    if squares:
        geojson = generate_output_path(output, '_argmax', '.geojson')
        if save_argmax_geojson(squares, geojson):
            written.append(geojson)
    return written
