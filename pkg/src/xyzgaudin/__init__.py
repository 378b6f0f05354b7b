"""Numerical toolkit for the inhomogeneous higher-spin XYZ chain and its
elliptic Gaudin limit: theta-function layer, quadratic-algebra spin
representations, chain operators, Bethe solvers, eigenvector construction,
and a batch verification CLI."""

from .elliptic import ModulusContext

__version__ = "0.1.0"

__all__ = ["ModulusContext", "__version__"]
