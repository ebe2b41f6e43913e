"""A small LCF-style logical framework with a homotopy type theory inside it."""

__version__ = "0.1.0"
