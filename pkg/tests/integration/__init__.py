"""Integration tests: long training experiments (marked slow)."""
