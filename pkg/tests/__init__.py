"""
Test suite for the plexpand package.

This package contains all tests for the piecewise linearization, certificate,
solver and Newton functionality.
"""
