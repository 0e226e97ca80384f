"""CLI interface for hecke-product."""

from .main import cli

__all__ = ["cli"]
