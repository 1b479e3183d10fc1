"""
Unit tests for the config module.
"""

import pytest
import tempfile
import os
import yaml
from pathlib import Path
from typing import Any, Dict
from unittest.mock import patch, mock_open

from polyflow.config import Config


def _write(config: Any) -> str:
    with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
        yaml.dump(config, f)
    return f.name


class TestConfig:
    """Test cases for the Config class."""

    def test_init_with_valid_config_file(self, temp_config_file: str) -> None:
        """Test Config initialization with a valid config file."""
        config = Config(temp_config_file)
        assert config.config_path == Path(temp_config_file)
        assert 'analysis' in config.config
        assert 'simulation' in config.config
        assert 'density' in config.config

    def test_init_with_none_config_path(self, sample_config: Dict[str, Any]) -> None:
        """Test Config initialization with None config path."""
        with patch('os.path.expanduser') as mock_expanduser, \
             patch('os.path.exists') as mock_exists, \
             patch('builtins.open', mock_open(read_data=yaml.dump(sample_config))):

            mock_expanduser.return_value = '/home/user/.config/polyflow/config.yaml'
            mock_exists.return_value = True

            config = Config()
            assert config.config_path == Path('/home/user/.config/polyflow/config.yaml')

    def test_default_config_file(self) -> None:
        """Test that the bundled config.yaml loads."""
        with patch('os.path.exists', return_value=False):
            config = Config()
        assert config.get('simulation.scheme') == 'monte-carlo'
        assert config.get('kronecker.resolution') == 64

    def test_init_with_missing_config_file(self) -> None:
        """Test Config initialization with missing config file."""
        with pytest.raises(FileNotFoundError):
            Config('/nonexistent/config.yaml')

    def test_init_with_invalid_yaml(self) -> None:
        """Test Config initialization with invalid YAML."""
        with tempfile.NamedTemporaryFile(mode='w', suffix='.yaml', delete=False) as f:
            f.write('invalid: yaml: content: [')
        try:
            with pytest.raises(yaml.YAMLError):
                Config(f.name)
        finally:
            os.unlink(f.name)

    def test_validate_config_missing_sections(self, sample_config: Dict[str, Any]) -> None:
        """Test config validation with missing required sections."""
        del sample_config['kronecker']
        path = _write(sample_config)
        try:
            with pytest.raises(ValueError, match="Missing required configuration section"):
                Config(path)
        finally:
            os.unlink(path)

    def test_validate_config_not_a_mapping(self) -> None:
        """Test a YAML file holding a list."""
        path = _write([1, 2, 3])
        try:
            with pytest.raises(ValueError, match="mapping"):
                Config(path)
        finally:
            os.unlink(path)

    @pytest.mark.parametrize('section, key, value, message', [
        ('analysis', 'budget', -1, "analysis.budget"),
        ('simulation', 'samples', 0, "simulation.samples"),
        ('simulation', 'scheme', 'sobol', "simulation.scheme"),
        ('simulation', 'R', -5, "simulation.R"),
        ('simulation', 'slack', -0.1, "simulation.slack"),
        ('density', 'delta', -0.05, "density.delta"),
        ('density', 'step', 0, "density.step"),
        ('output', 'format', 'xml', "output.format"),
    ])
    def test_validate_config_invalid_values(self, sample_config: Dict[str, Any], section: str,
                                            key: str, value: Any, message: str) -> None:
        """Test config validation with invalid values."""
        sample_config[section][key] = value
        path = _write(sample_config)
        try:
            with pytest.raises(ValueError, match=message):
                Config(path)
        finally:
            os.unlink(path)

    def test_get_method(self, temp_config_file: str) -> None:
        """Test the get method with dot notation."""
        config = Config(temp_config_file)
        assert config.get('simulation.R') == 2000
        assert config.get('density.snap') == 1.0e-9
        assert config.get('simulation.missing') is None
        assert config.get('missing.section', 'default') == 'default'

    def test_section_getters(self, temp_config_file: str, sample_config: Dict[str, Any]) -> None:
        """Test the per-section getters."""
        config = Config(temp_config_file)
        assert config.get_analysis_config() == sample_config['analysis']
        assert config.get_simulation_config() == sample_config['simulation']
        assert config.get_seminorm_config() == sample_config['seminorm']
        assert config.get_kronecker_config() == sample_config['kronecker']
        assert config.get_density_config() == sample_config['density']
        assert config.get_output_config() == sample_config['output']

    def test_reload(self, temp_config_file: str, sample_config: Dict[str, Any]) -> None:
        """Test configuration reload."""
        config = Config(temp_config_file)
        sample_config['simulation']['R'] = 500
        with open(temp_config_file, 'w') as f:
            yaml.dump(sample_config, f)
        config.reload()
        assert config.get('simulation.R') == 500
