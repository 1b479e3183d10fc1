"""
Integration tests for the polyflow runner and CLI.
"""
