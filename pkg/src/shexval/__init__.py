"""Validation of edge-labeled graphs against shape schemas with bag-semantics content models."""

__version__ = "0.1.0"
