"""Logging and console setup for the command line."""
from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

console = Console(stderr=True, highlight=False)

_LEVELS = {0: logging.WARNING, 1: logging.INFO}


def setup_logging(verbosity: int = 0) -> None:
    level = _LEVELS.get(verbosity, logging.DEBUG)
    root = logging.getLogger("ehcap")
    root.handlers.clear()
    root.addHandler(RichHandler(console=console, show_path=False, markup=False))
    root.setLevel(level)
    root.propagate = False


def status(icon: str, message: str) -> None:
    """One human status line on stderr."""
    console.print(f"{icon}  {message}", markup=False)
