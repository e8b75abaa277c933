"""Exact chain-level calculus for cyclic homology of deformation-quantized algebras."""

__version__ = "0.1.0"
