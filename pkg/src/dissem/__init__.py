"""Data dissemination in synchronous dynamic networks under oblivious message adversaries."""

__version__ = "0.1.0"
