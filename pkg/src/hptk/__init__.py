"""Exact homotopy transfer and perturbation toolkit for finite-dimensional DG algebras."""

__version__ = "0.1.0"
