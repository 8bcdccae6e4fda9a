"""Exact counting, polymer expansions and numerical checks for antichains in [t]^n."""

__version__ = "0.1.0"
