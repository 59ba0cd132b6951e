"""
Shared fixtures for the test suite
"""
import sys
from pathlib import Path

import pytest

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from core.geometry import Square, disk_domain, make_test_domain  # noqa: E402
from core.moduli import log_modulus, power_modulus  # noqa: E402


@pytest.fixture
def power_half():
    return power_modulus(0.5)


@pytest.fixture
def log_one():
    return log_modulus(1.0)


@pytest.fixture
def unit_disk():
    return disk_domain(1.0)


@pytest.fixture
def star_power():
    return make_test_domain(power_modulus(0.5), 0.1, 6)


@pytest.fixture
def disk_box():
    """Box of side 4 around the unit disk: masked inputs sit in its middle half"""
    return Square(0j, 4.0)
