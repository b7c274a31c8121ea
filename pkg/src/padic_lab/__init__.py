"""Exact finite models for p-adic microlocal kernels on PGL2 and their identities."""

__version__ = "0.1.0"
