"""Exact curved DGA algebra and path-space numerics."""
