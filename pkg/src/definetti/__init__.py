"""Finite de Finetti representations in exact arithmetic."""
__version__ = "0.1.0"
