"""Multiscale Robin coupled Darcy solver with oversampling and smoothing."""

__version__ = "0.1.0"
