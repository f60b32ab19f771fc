"""Mildness certificates for pro-p presentations from linking numbers of primes."""

__version__ = "0.1.0"
