"""Exact equivariant cochain models for interior cohomology, duality and Hecke operators."""

from ._backend import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
