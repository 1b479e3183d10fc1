"""
Test suite for polyflow.

This package contains unit and integration tests for all components
of polyflow including the exact polynomial layer, complexity certificates,
flows and averages, interval sets and the CLI.
"""

__version__ = "1.0.0"
