"""Sampled closed paths in C^2 and their symplectic action."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import ValidationError

log = logging.getLogger(__name__)

# Point4 layout: (x1, x2, y1, y2) with z_j = x_j + i*y_j.
X = slice(0, 2)
Y = slice(2, 4)

_CLOSURE_WARN = 1e-6


def as_point4(pt) -> np.ndarray:
    arr = np.asarray(pt, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValidationError(f"expected (..., 4) coordinates (x1, x2, y1, y2), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("point coordinates must be finite")
    return arr


def segment_action(points: np.ndarray) -> float:
    """Sum of signed areas in the (x1, y1) and (x2, y2) planes of a polygon.

    `points` lists the vertices in order; the last point is joined back to the
    first if they differ.
    """
    x, y = points[:, X], points[:, Y]
    x_next, y_next = np.roll(x, -1, axis=0), np.roll(y, -1, axis=0)
    return 0.5 * float(np.sum(x * y_next - x_next * y))


@dataclass
class CharacteristicPath:
    """Time-sampled trajectory in C^2."""

    times: np.ndarray
    points: np.ndarray
    period: float
    action: float
    closure_residual: float
    piecewise_linear: bool = False

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.points = as_point4(self.points)
        if self.points.ndim != 2 or len(self.times) != len(self.points):
            raise ValidationError("times and points must have matching lengths")

    def samples(self) -> Iterator[tuple[float, np.ndarray]]:
        return zip(self.times.tolist(), self.points)

    @property
    def diameter(self) -> float:
        span = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.linalg.norm(span))

    def det_xy(self) -> np.ndarray:
        """x1*y2 - x2*y1 at every sample."""
        p = self.points
        return p[:, 0] * p[:, 3] - p[:, 1] * p[:, 2]

    def reversed(self) -> "CharacteristicPath":
        return CharacteristicPath(
            times=self.times[-1] - self.times[::-1],
            points=self.points[::-1].copy(),
            period=self.period,
            action=-self.action,
            closure_residual=self.closure_residual,
            piecewise_linear=self.piecewise_linear,
        )


def action_of_path(path: CharacteristicPath) -> float:
    """-1/2 of the integral of <J z', z> along a closed sampled path.

    Piecewise-linear paths are exact; smooth paths are treated as the polygon
    through their samples, so the error is second order in the sample spacing.
    """
    scale = max(path.diameter, 1.0)
    if path.closure_residual > _CLOSURE_WARN * scale:
        log.warning(
            "path is poorly closed (residual %.3e, diameter %.3e); action is approximate",
            path.closure_residual, path.diameter,
        )
    pts = path.points
    if np.linalg.norm(pts[0] - pts[-1]) <= 1e-15 * scale:
        pts = pts[:-1]
    return segment_action(pts)
