"""
Configuration management for polyflow.
"""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
import logging

logger = logging.getLogger(__name__)

VALID_SCHEMES = ['grid', 'monte-carlo', 'low-discrepancy']
VALID_FORMATS = ['json', 'csv']


class Config:
    """Configuration manager for polyflow runs."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration from YAML file."""
        if config_path is None:
            # Try user config first, then fallback to default
            user_config = os.path.expanduser("~/.config/polyflow/config.yaml")
            if os.path.exists(user_config):
                config_path = user_config
            else:
                config_path = os.path.join(os.path.dirname(__file__), "..", "config.yaml")

        self.config_path = Path(config_path)
        self.config = self._load_config()
        self._validate_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        try:
            with open(self.config_path, 'r') as f:
                config = yaml.safe_load(f)
            logger.info(f"Loaded configuration from {self.config_path}")
            return config
        except FileNotFoundError:
            logger.error(f"Configuration file not found: {self.config_path}")
            raise
        except yaml.YAMLError as e:
            logger.error(f"Error parsing configuration file: {e}")
            raise

    def _validate_config(self) -> None:
        """Validate configuration structure and values."""
        if not isinstance(self.config, dict):
            raise ValueError("Configuration file must contain a mapping")

        required_sections = ['analysis', 'simulation', 'seminorm', 'kronecker', 'density', 'output']

        for section in required_sections:
            if section not in self.config:
                raise ValueError(f"Missing required configuration section: {section}")

        # Validate analysis settings
        analysis = self.config['analysis']
        budget = analysis.get('budget', 10000)
        if not isinstance(budget, int) or isinstance(budget, bool) or budget < 0:
            raise ValueError("analysis.budget must be a nonnegative integer")

        # Validate simulation settings
        simulation = self.config['simulation']
        samples = simulation.get('samples', 200000)
        if not isinstance(samples, int) or isinstance(samples, bool) or samples <= 0:
            raise ValueError("simulation.samples must be a positive integer")
        if simulation.get('scheme', 'monte-carlo') not in VALID_SCHEMES:
            raise ValueError(f"simulation.scheme must be one of: {VALID_SCHEMES}")
        if not isinstance(simulation.get('R', 2000), (int, float)) or simulation.get('R', 2000) <= 0:
            raise ValueError("simulation.R must be a positive number")
        slack = simulation.get('slack', 0.05)
        if not isinstance(slack, (int, float)) or slack < 0:
            raise ValueError("simulation.slack must be a nonnegative number")

        # Validate density settings
        density = self.config['density']
        if not isinstance(density.get('delta', 0.05), (int, float)) or density.get('delta', 0.05) < 0:
            raise ValueError("density.delta must be a nonnegative number")
        if not isinstance(density.get('step', 0.01), (int, float)) or density.get('step', 0.01) <= 0:
            raise ValueError("density.step must be a positive number")

        # Validate output settings
        if self.config['output'].get('format', 'json') not in VALID_FORMATS:
            raise ValueError(f"output.format must be one of: {VALID_FORMATS}")

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value using dot notation."""
        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def get_analysis_config(self) -> Dict[str, Any]:
        """Get complexity analysis configuration."""
        return self.config['analysis']

    def get_simulation_config(self) -> Dict[str, Any]:
        """Get simulation configuration."""
        return self.config['simulation']

    def get_seminorm_config(self) -> Dict[str, Any]:
        """Get seminorm configuration."""
        return self.config['seminorm']

    def get_kronecker_config(self) -> Dict[str, Any]:
        """Get Kronecker limit configuration."""
        return self.config['kronecker']

    def get_density_config(self) -> Dict[str, Any]:
        """Get density scan configuration."""
        return self.config['density']

    def get_output_config(self) -> Dict[str, Any]:
        """Get output configuration."""
        return self.config['output']

    def reload(self) -> None:
        """Reload configuration from file."""
        self.config = self._load_config()
        self._validate_config()
        logger.info("Configuration reloaded")
