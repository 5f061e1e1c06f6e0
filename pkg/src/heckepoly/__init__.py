"""Hecke eigenvalue moments over sums of triangular numbers.

Exact Fourier coefficients of level-1 eigenforms, representation numbers of
the quaternary triangular polynomials, Euler products for the associated
L-functions, and square-free power moments of normalized eigenvalues.
"""

from heckepoly.errors import InvalidArgument, ResourceLimitError

__version__ = "0.1.0"

__all__ = ["InvalidArgument", "ResourceLimitError", "__version__"]
