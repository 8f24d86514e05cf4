"""Finite-dimensional and Fourier-truncated Lie bialgebra computations."""

__version__ = "0.1.0"
