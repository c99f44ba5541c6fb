"""Triorthogonal CSS codes and a simulator for multi-party quantum computation on top of them."""

__version__ = "0.1.0"
