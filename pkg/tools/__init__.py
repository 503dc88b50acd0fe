"""CLI and report validation tools."""
