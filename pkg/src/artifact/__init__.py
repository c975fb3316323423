"""Executable dyadic harmonic analysis, normed-space linear algebra, operator
interpolation, discrete variational problems and quasisymmetric Cantor maps."""

__version__ = "0.1.0"
