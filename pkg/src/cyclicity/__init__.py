"""Cyclicity analysis of multivariate signals and Ornstein-Uhlenbeck processes."""

__version__ = "0.1.0"
