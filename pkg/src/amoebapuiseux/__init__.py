"""Amoebas, discriminant monodromy and cone-supported Puiseux expansions."""

__version__ = "0.1.0"
