"""Discrete Laplace transforms, random-size order statistics and transform-based stochastic orders."""

__version__ = "0.1.0"
