"""Tests for the ic-collision-nets project."""
