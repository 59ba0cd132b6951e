"""
Input validation functions for the command line
"""
import os
from pathlib import Path
from typing import Optional

from utils.logger_config import logger
from .geometry import PlanarDomain
from .grid_function import GridFunction


def validate_input_file(input_path: str, file_type: str) -> bool:
    """
    Validate a single input file

    Args:
        input_path: Path to the file
        file_type: Type description for logging (e.g., 'Config', 'Grid')

    Returns:
        bool: True if valid
    """
    if not os.path.exists(input_path):
        logger.error(f"{file_type} file not found: {input_path}")
        return False

    if not os.path.isfile(input_path):
        logger.error(f"{file_type} path is not a file: {input_path}")
        return False

    valid_extensions = {'Config': ['.json'], 'Grid': ['.csv']}.get(file_type, [])
    if valid_extensions and not any(input_path.lower().endswith(ext) for ext in valid_extensions):
        logger.warning(f"{file_type} file may not be a valid format: {input_path}")

    logger.info(f"{file_type} file validated: {input_path}")
    return True


def validate_output_file(output_file: str) -> bool:
    """
    Validate the parent folder of an output file can be created or accessed

    Args:
        output_file: Path to output file

    Returns:
        bool: True if valid
    """
    try:
        Path(output_file).parent.mkdir(parents=True, exist_ok=True)
        logger.info(f"Output folder validated/created: {Path(output_file).parent}")
        return True
    except Exception as e:
        logger.error(f"Cannot create output folder: {e}")
        return False


def validate_grid_for_domain(f: GridFunction, d: PlanarDomain, label: str = 'Input') -> bool:
    """
    Validate that a grid's box contains the domain's bounding box

    Args:
        f: Grid function
        d: Domain
        label: Description for logging

    Returns:
        bool: True if valid
    """
    if not f.box.contains_square(d.bounding_box):
        logger.error(
            f"{label} grid box {f.box} does not contain the domain's bounding box {d.bounding_box}"
        )
        return False
    logger.debug(f"{label} grid box validated against the domain")
    return True


def validate_all_inputs(config_file: Optional[str], grid_file: Optional[str], output_file: Optional[str]) -> bool:
    """
    Validate the file arguments of one command

    Args:
        config_file: Path to JSON config, or None
        grid_file: Path to grid CSV, or None
        output_file: Path to output file, or None

    Returns:
        bool: True if all given inputs are valid
    """
    validations = []
    if config_file is not None:
        validations.append(validate_input_file(config_file, 'Config'))
    if grid_file is not None:
        validations.append(validate_input_file(grid_file, 'Grid'))
    if output_file is not None:
        validations.append(validate_output_file(output_file))

    return all(validations)
