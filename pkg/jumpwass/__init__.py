"""Wasserstein robustness analysis of stochastic jump linear systems"""

__version__ = "1.0.0"
