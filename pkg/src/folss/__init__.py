"""Exact spectral sequences of finite foliated models and cup-length bounds."""

__version__ = "0.1.0"
