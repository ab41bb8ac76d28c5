"""Third-order intensity correlations of three interfering light sources."""

__version__ = "0.1.0"
