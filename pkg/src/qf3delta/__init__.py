"""Delta-method toolkit for integral points on ternary quadratic surfaces."""

__version__ = "0.1.0"
