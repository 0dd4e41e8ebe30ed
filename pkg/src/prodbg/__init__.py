"""Fault localization and repair for Prolog programs."""

__version__ = "0.1.0"
