"""Equivariant homology of finite group actions through finite mapping telescopes."""

__version__ = "0.1.0"
