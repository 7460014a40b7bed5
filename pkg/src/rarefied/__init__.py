"""Numerics for rarefied elliptic hypergeometric functions."""

__version__ = "0.1.0"
