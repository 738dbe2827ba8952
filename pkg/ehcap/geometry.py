"""Gauges and defining functions of the bidisc and of its smooth approximants D_n.

D_n = { g(n(|x|^2 - 1)) + g(n(|y|^2 - 1)) <= 1 } with g(s) = max(s, 0)^p.
Points use the (x1, x2, y1, y2) layout from `paths`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericalError, ValidationError
from .paths import X, Y, as_point4

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ApproximantParams:
    """Sharpness index n and profile exponent p of D_n."""

    n: int
    p: float = 3.0

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if not self.p >= 2:
            raise ValidationError(f"p must be >= 2 for a C^1 boundary, got {self.p!r}")

    @property
    def outer_sq(self) -> float:
        """Squared outer radius 1 + 1/n reached by |x| or |y| on D_n."""
        return 1.0 + 1.0 / self.n

    def g(self, s):
        return np.maximum(s, 0.0) ** self.p

    def dg(self, s):
        return self.p * np.maximum(s, 0.0) ** (self.p - 1)

    def g_inv(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValidationError("g^-1 is only defined on [0, inf)")
        out = u ** (1.0 / self.p)
        return float(out) if out.ndim == 0 else out

    def label(self) -> str:
        return f"D_{self.n} (p={self.p:g})"


def g_profile(s: float, params: ApproximantParams) -> tuple[float, float, float]:
    """(g(s), g'(s), g^-1(g(s)))."""
    value = float(params.g(s))
    return value, float(params.dg(s)), float(params.g_inv(value))


# ── bidisc ───────────────────────────────────────────────────────────────────

def gauge_bidisc(pt) -> np.ndarray | float:
    """(|z1|^2 + |z2|^2)/2 + |Re(z1^2 + z2^2)|/2, which equals max(|x|^2, |y|^2)."""
    p = as_point4(pt)
    x2 = np.sum(p[..., X] ** 2, axis=-1)
    y2 = np.sum(p[..., Y] ** 2, axis=-1)
    r = 0.5 * (x2 + y2) + 0.5 * np.abs(x2 - y2)
    return float(r) if np.ndim(r) == 0 else r


def in_bidisc(pt) -> np.ndarray | bool:
    return gauge_bidisc(pt) <= 1.0


# ── D_n ──────────────────────────────────────────────────────────────────────

def defining_Dn(pt, params: ApproximantParams) -> np.ndarray | float:
    """g(n(|x|^2-1)) + g(n(|y|^2-1)) - 1; negative inside D_n."""
    p = as_point4(pt)
    n = params.n
    x2 = np.sum(p[..., X] ** 2, axis=-1)
    y2 = np.sum(p[..., Y] ** 2, axis=-1)
    h = params.g(n * (x2 - 1.0)) + params.g(n * (y2 - 1.0)) - 1.0
    return float(h) if np.ndim(h) == 0 else h


def grad_defining_Dn(pt, params: ApproximantParams) -> np.ndarray:
    p = as_point4(pt)
    n = params.n
    x, y = p[..., X], p[..., Y]
    cx = 2.0 * n * params.dg(n * (np.sum(x * x, axis=-1) - 1.0))
    cy = 2.0 * n * params.dg(n * (np.sum(y * y, axis=-1) - 1.0))
    return np.concatenate([cx[..., None] * x, cy[..., None] * y], axis=-1)


def in_Dn(pt, params: ApproximantParams) -> np.ndarray | bool:
    return defining_Dn(pt, params) <= 0.0


def gauge_Dn(
    pt,
    params: ApproximantParams,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """The s > 0 with pt / sqrt(s) on the boundary of D_n.

    The inclusions D_n / sqrt(1+1/n) in D^2 x D^2 in D_n bracket the root
    between r/(1+1/n) and r, r the bidisc gauge; the bracket is widened if
    the ends do not straddle it.
    """
    p = as_point4(pt)
    if p.ndim != 1:
        raise ValidationError("gauge_Dn takes a single point")
    r = gauge_bidisc(p)
    if r == 0.0:
        raise ValidationError("gauge_Dn is undefined at the origin")

    def h(tau: float) -> float:
        return defining_Dn(p / math.sqrt(tau), params)

    lo, hi = r / params.outer_sq * (1 - 1e-3), r * (1 + 1e-3)
    for _ in range(tolerances.gauge_max_iter):
        if h(lo) > 0.0 > h(hi):
            break
        lo, hi = lo / 2.0, hi * 2.0
    else:
        raise NumericalError(f"could not bracket the gauge of {params.label()} at {p.tolist()}")

    return brentq(h, lo, hi, xtol=1e-300, rtol=tolerances.gauge_rtol, maxiter=tolerances.gauge_max_iter)


# ── inclusion checks ─────────────────────────────────────────────────────────

@dataclass
class SandwichReport:
    """Monte-Carlo check of D_{n+1} in D_n and D_n/sqrt(1+1/n) in D^2 x D^2 in D_n."""

    n: int
    p: float
    samples: int
    seed: int
    violations: dict[str, int] = field(default_factory=dict)
    worst_margin: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "samples": self.samples,
            "seed": self.seed,
            "violations": dict(self.violations),
            "worst_margin": dict(self.worst_margin),
            "ok": self.ok,
        }


def _check(report: SandwichReport, name: str, inner: np.ndarray, margin: np.ndarray) -> None:
    """Count points of `inner` whose outer-set margin (<= 0 means inside) is positive."""
    m = margin[inner]
    report.violations[name] = int(np.count_nonzero(m > 0.0))
    report.worst_margin[name] = float(m.max()) if m.size else float("-inf")


def sandwich_check(
    params: ApproximantParams,
    samples: int,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> SandwichReport:
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    rng = rng or np.random.default_rng(seed)
    radius = math.sqrt(params.outer_sq) * 1.05
    pts = rng.uniform(-radius, radius, size=(samples, 4))
    nxt = ApproximantParams(params.n + 1, params.p)
    scale = math.sqrt(params.outer_sq)

    report = SandwichReport(params.n, params.p, samples, seed)
    h_n = defining_Dn(pts, params)
    _check(report, "D_n+1 in D_n", in_Dn(pts, nxt), h_n)
    _check(report, "D_n/sqrt(1+1/n) in bidisc", in_Dn(pts * scale, params), gauge_bidisc(pts) - 1.0)
    _check(report, "bidisc in D_n", in_bidisc(pts), h_n)

    # the boundary of the bidisc sits strictly inside D_n
    angles = rng.uniform(0, 2 * np.pi, size=(samples, 2))
    radii = rng.uniform(0, 1, size=samples)
    edge = np.column_stack([
        np.cos(angles[:, 0]), np.sin(angles[:, 0]),
        radii * np.cos(angles[:, 1]), radii * np.sin(angles[:, 1]),
    ])
    _check(report, "bidisc boundary in D_n", np.ones(samples, dtype=bool), defining_Dn(edge, params))
    log.debug("sandwich check %s: %s", params.label(), report.violations)
    return report
