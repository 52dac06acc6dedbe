"""Artifact files, config diagnostics, logging and run metrics."""
