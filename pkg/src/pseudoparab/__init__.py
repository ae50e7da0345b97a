"""Cauchy data on a decreasing curve for a fifth-order pseudoparabolic
equation: data transforms, agreement diagnostics, and a Picard jet solver."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
