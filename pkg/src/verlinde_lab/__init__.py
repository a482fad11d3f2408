"""Exact Verlinde computations for the even symplectic-fermion vertex algebra."""

__version__ = "0.1.0"
