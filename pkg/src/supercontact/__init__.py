"""Exact symbolic computation for the contact superalgebra K on R^{1|1}."""

__version__ = "0.1.0"
