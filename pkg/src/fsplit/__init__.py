"""Exact computations with p^{-e}-linear maps on quotients of polynomial rings over F_p."""

__version__ = "0.1.0"
