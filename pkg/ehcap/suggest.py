"""Did-you-mean hints for subcommands, domain kinds and family names."""
from __future__ import annotations

from typing import Iterable, Optional

from rapidfuzz import fuzz, process, utils

_MIN_SCORE = 60.0


def closest(query: str, choices: Iterable[str]) -> Optional[str]:
    """Best fuzzy match for `query`, or None when nothing is close enough."""
    choices = list(choices)
    if not query.strip() or not choices:
        return None
    match = process.extractOne(
        query, choices, scorer=fuzz.WRatio, processor=utils.default_process, score_cutoff=_MIN_SCORE
    )
    return match[0] if match else None


def hint(query: str, choices: Iterable[str]) -> str:
    best = closest(query, choices)
    return f" (did you mean {best!r}?)" if best else ""
