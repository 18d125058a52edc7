"""Quillen model structures on module categories of Frobenius algebras over F_p."""

__version__ = "0.1.0"
