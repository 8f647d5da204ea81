"""Static checker for MiniC programs."""
