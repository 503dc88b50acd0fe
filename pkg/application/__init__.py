"""Application layer: suite configuration, runners and reports."""
