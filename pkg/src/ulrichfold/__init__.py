"""Ulrich bundles on cubic fourfolds via linear matrix factorizations over F_p."""

__version__ = "0.1.0"
