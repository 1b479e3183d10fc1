"""
Unit tests for polyflow components.
"""
