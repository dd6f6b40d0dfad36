"""Synthesis of For-all person-in-the-middle attacks on protocol models."""

__version__ = "0.1.0"
