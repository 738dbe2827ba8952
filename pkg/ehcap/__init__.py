"""Ekeland-Hofer capacities of the Lagrangian bidisc and its smooth approximants."""

__version__ = "0.1.0"
