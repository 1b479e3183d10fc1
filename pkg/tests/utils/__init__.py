"""
Utility tests for polyflow config and file helpers.
"""
