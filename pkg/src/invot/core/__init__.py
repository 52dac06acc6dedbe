"""Shared numerical primitives and run configuration."""
