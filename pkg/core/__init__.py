"""Hecke product - numerical verification of product formulas for Hecke Dirichlet series."""

__version__ = "0.1.0"

from . import arith, lfun, riesz, special, gseries

__all__ = ["arith", "lfun", "riesz", "special", "gseries", "__version__"]
