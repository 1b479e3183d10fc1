"""
Pytest configuration and common fixtures for polyflow tests.
"""

import pytest
import tempfile
import os
import yaml
from typing import Dict, Any, Generator

import numpy as np

# Add the project root to the Python path
import sys
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from polyflow.family import PolyFamily
from polyflow.parser import parse_family


@pytest.fixture
def sample_config() -> Dict[str, Any]:
    """Provide a sample configuration for testing."""
    return {
        'analysis': {
            'budget': 10000,
            'exact_search': True,
            'max_flats': 20000
        },
        'simulation': {
            'R': 2000,
            'samples': 20000,
            'seed': 0,
            'scheme': 'monte-carlo',
            'slack': 0.05,
            'l2_grid': 8,
            'tau': 'pi'
        },
        'seminorm': {
            'N': 500,
            'levels': 1
        },
        'kronecker': {
            'resolution': 32
        },
        'density': {
            'delta': 0.05,
            'epsilon': 0.1,
            'smax': 5,
            'step': 0.05,
            'window': 10,
            'snap': 1.0e-9
        },
        'output': {
            'format': 'json',
            'schema': 1
        }
    }


@pytest.fixture
def temp_config_file(sample_config: Dict[str, Any]) -> Generator[str, None, None]:
    """Create a temporary config file for testing."""
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
        yaml.dump(sample_config, f)
    yield f.name
    os.unlink(f.name)


@pytest.fixture
def temp_dir() -> Generator[str, None, None]:
    """Create a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield temp_dir


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for reproducible random observables."""
    return np.random.default_rng(20240601)


@pytest.fixture
def families() -> Dict[str, PolyFamily]:
    """Worked example families with known complexity bounds."""
    return {
        'repeated': parse_family("u1, 2*u1, u2"),
        'difference': parse_family("u1, u2, 2*u1 - u2"),
        'pi_mixed': parse_family("u1, u2, u3, pi*u1 + pi^2*u3, 3*u2"),
        'shared_u4': parse_family("u1, u2, u3, 2*u1 + u4, 2*u2 + u4, 2*u3 + u4"),
        'pair_sum': parse_family("u1, u2, u1+u2"),
        'triple_sum': parse_family("u1, u2, u3, u1+u2+u3"),
        'cube3': parse_family("u1, u2, u3, u1+u2, u1+u3, u2+u3, u1+u2+u3"),
        'pi_powers': parse_family(
            "pi*u1 + pi^2*u2, pi^2*u1 + pi^3*u3, pi*u1 + pi^2*u2 + pi*u3, pi*u2 + pi*u3"
        ),
        'mixed_degree': parse_family("t, 2t, t^2"),
        'independent': parse_family("t, t^2"),
    }


@pytest.fixture
def periodic_file(temp_dir: str) -> str:
    """Interval file for the union of [n, n + 0.3) over all integers n."""
    path = os.path.join(temp_dir, 'E.txt')
    with open(path, 'w') as f:
        f.write("period=1\n0,0.3\n")
    return path


@pytest.fixture(autouse=True)
def setup_logging() -> None:
    """Setup logging for tests."""
    import logging
    logging.basicConfig(level=logging.WARNING)
    # Suppress library warnings during tests
    logging.getLogger('polyflow').setLevel(logging.ERROR)
