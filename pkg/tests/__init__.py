"""Tests for chebylab."""
