"""Nontrivial solutions of the modified Nicomachus identity through the
arithmetic of the Eisenstein integers."""

__version__ = "0.1.0"
