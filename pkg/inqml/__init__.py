"""Inquisitive modal logic toolkit."""

__version__ = "0.1.0"
