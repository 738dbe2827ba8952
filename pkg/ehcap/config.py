"""Tolerances and run configuration."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from .errors import ValidationError

OUTPUT_DIR_ENV = "EHCAP_OUTPUT_DIR"
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Tolerances:
    """Every numeric tolerance used by the library, in one place."""

    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    gauge_rtol: float = 1e-12
    gauge_max_iter: int = 200
    quad_rtol: float = 1e-8
    quad_nodes: int = 48
    quad_max_nodes: int = 3072
    shoot_xtol: float = 1e-13
    shoot_residual: float = 1e-10
    value_tol: float = 1e-12
    closure_tol: float = 1e-12
    spectrum_n_cap: int = 64
    psi_oversample: int = 8
    l1_nodes: int = 2048
    l1_slack: float = 1e-9
    transit_time_cap: float = 10.0

    @classmethod
    def from_rc(cls, rc: dict[str, str]) -> "Tolerances":
        """Build from `.ehcaprc` strings; unknown keys are ignored."""
        kwargs: dict[str, Any] = {}
        for f in fields(cls):
            if f.name not in rc:
                continue
            cast = int if f.type in ("int", int) else float
            try:
                kwargs[f.name] = cast(rc[f.name])
            except ValueError as exc:
                raise ValidationError(f"bad value for {f.name!r} in rc file: {rc[f.name]!r}") from exc
        if "tol" in rc and "ode_rtol" not in rc:
            try:
                kwargs["ode_rtol"] = float(rc["tol"])
            except ValueError as exc:
                raise ValidationError(f"bad value for 'tol' in rc file: {rc['tol']!r}") from exc
        return cls(**kwargs)

    def with_ode_tol(self, tol: Optional[float]) -> "Tolerances":
        if tol is None:
            return self
        if tol <= 0:
            raise ValidationError(f"tol must be positive, got {tol}")
        return replace(self, ode_rtol=tol, ode_atol=min(self.ode_atol, tol))


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class RunConfig:
    """One CLI invocation: command, its parameters, and where the artifact goes."""

    command: str
    params: dict[str, Any] = field(default_factory=dict)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    seed: int = 0
    output: Optional[Path] = None
    fmt: str = "json"
    cache_ttl_seconds: int = 0

    @classmethod
    def from_args(
        cls,
        command: str,
        params: dict[str, Any],
        *,
        tolerances: Tolerances,
        seed: int,
        output: Optional[str],
        output_dir: Optional[str],
        fmt: str,
        cache_ttl_seconds: int = 0,
    ) -> "RunConfig":
        if fmt not in FORMATS:
            raise ValidationError(f"unknown format {fmt!r} (expected one of {', '.join(FORMATS)})")
        out_dir = os.environ.get(OUTPUT_DIR_ENV) or output_dir
        if output:
            path: Optional[Path] = None if output == "-" else Path(output)
        elif out_dir:
            path = Path(out_dir) / f"{command}.{fmt}"
        else:
            path = None
        return cls(
            command=command,
            params=params,
            tolerances=tolerances,
            seed=seed,
            output=path,
            fmt=fmt,
            cache_ttl_seconds=cache_ttl_seconds,
        )

    def label(self) -> str:
        where = str(self.output) if self.output else "stdout"
        return f"{self.command} → {where} ({self.fmt})"
