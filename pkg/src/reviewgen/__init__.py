"""Harvest hyperbolic and creative templates from star-rated reviews and generate reviews from them."""

__version__ = "0.1.0"
