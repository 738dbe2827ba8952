"""Artifact writers (CSV / JSON) and the on-disk result cache."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np

from .config import RunConfig
from .errors import ValidationError

SCHEMA_VERSION = 1

# ── Cache config ─────────────────────────────────────────────────────────────

_CACHE_DIR = Path.home() / ".cache" / "ehcap"
_CACHE_VERSION = 1
DEFAULT_TTL_MINUTES = 20160  # 2 weeks


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return _jsonable(float(value))
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _cache_key(kind: str, params: dict[str, Any]) -> str:
    """Stable filename key based on (kind, params)."""
    raw = json.dumps({"kind": kind, "params": _jsonable(params)}, sort_keys=True)
    return hashlib.sha1(raw.encode()).hexdigest()[:16]


def _cache_path(kind: str, params: dict[str, Any]) -> Path:
    _CACHE_DIR.mkdir(parents=True, exist_ok=True)
    return _CACHE_DIR / f"{_cache_key(kind, params)}.json"


# ── Public cache API ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CacheEntry:
    """Cached result with the time it was computed."""

    result: dict[str, Any]
    timestamp: float

    @property
    def age_str(self) -> str:
        """Age in its coarsest whole unit, e.g. '3h ago'."""
        age = max(0, int(time.time() - self.timestamp))
        for unit, size in (("d", 86400), ("h", 3600), ("m", 60)):
            if age >= size:
                return f"{age // size}{unit} ago"
        return f"{age}s ago"


def load_cache(kind: str, params: dict[str, Any], ttl_seconds: int) -> Optional[CacheEntry]:
    """A fresh entry, or None.  ttl_seconds=0 skips the cache."""
    if ttl_seconds <= 0:
        return None
    path = _cache_path(kind, params)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
        if data.get("version") != _CACHE_VERSION:
            return None
        if time.time() - data["timestamp"] > ttl_seconds:
            return None
        return CacheEntry(result=data["result"], timestamp=data["timestamp"])
    except (OSError, ValueError, KeyError):
        return None


def save_cache(kind: str, params: dict[str, Any], result: dict[str, Any]) -> None:
    path = _cache_path(kind, params)
    try:
        path.write_text(json.dumps({
            "version": _CACHE_VERSION,
            "kind": kind,
            "params": _jsonable(params),
            "timestamp": time.time(),
            "result": _jsonable(result),
        }, indent=2, sort_keys=True))
    except OSError:
        pass  # cache write failure is non-fatal


# ── Writers ──────────────────────────────────────────────────────────────────

def render_json(config: RunConfig, result: Any) -> str:
    """Versioned envelope; `generated_at` is the only field that varies between runs."""
    doc = {
        "schema": SCHEMA_VERSION,
        "command": config.command,
        "params": _jsonable(config.params),
        "seed": config.seed,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "result": _jsonable(result),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_csv(rows: Iterable[dict[str, Any]]) -> str:
    rows = list(rows)
    if not rows:
        return ""
    columns: list[str] = []
    for row in rows:
        columns.extend(c for c in row if c not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


def write_artifact(config: RunConfig, result: Any, rows: Optional[Iterable[dict[str, Any]]] = None) -> Optional[Path]:
    """Write `result` as JSON or `rows` as CSV to the configured place."""
    if config.fmt == "csv":
        if rows is None:
            raise ValidationError(f"{config.command} has no tabular output; use --format json")
        text = render_csv(rows)
    else:
        text = render_json(config, result)
    if config.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return None
    config.output.parent.mkdir(parents=True, exist_ok=True)
    config.output.write_text(text)
    return config.output
