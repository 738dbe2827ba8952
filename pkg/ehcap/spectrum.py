"""Action spectrum of the Lagrangian bidisc D^2 x D^2.

Every action is either the length of a closed billiard orbit in the unit disc,
2n*cos(theta) with theta in J_n, or a gliding value 2*n*pi.  Writing the
bouncing values as 2n*sin(j*pi/n), the winding number j labels monotone
branches in n that accumulate at 2*j*pi from below, which is what makes the
enumeration below checkable.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ValidationError
from .paths import CharacteristicPath, segment_action

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# ── labels and elements ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class Bouncing:
    k: int
    n: int

    kind = "bouncing"


@dataclass(frozen=True)
class Gliding:
    n: int

    kind = "gliding"


Label = Union[Bouncing, Gliding]


@dataclass(frozen=True)
class SpectrumElement:
    """One action value with the orbit that produces it."""

    value: float
    label: Label

    @property
    def label_type(self) -> str:
        return self.label.kind

    @property
    def k(self) -> Optional[int]:
        return self.label.k if isinstance(self.label, Bouncing) else None

    @property
    def n(self) -> int:
        return self.label.n

    def to_dict(self) -> dict:
        return {"value": self.value, "label_type": self.label_type, "k": self.k, "n": self.n}


@dataclass
class SpectrumTable:
    """Result of an enumeration, with the winding branches the n-cap cut short."""

    bound: float
    n_cap: int
    elements: list[SpectrumElement] = field(default_factory=list)
    truncated_windings: list[int] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [e.value for e in self.elements]


# ── J_n ──────────────────────────────────────────────────────────────────────

def _check_n(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ValidationError(f"n must be an integer >= 2, got {n!r}")


def k_range(n: int) -> range:
    """Admissible indices k of J_n."""
    _check_n(n)
    if n % 2 == 0:
        return range(0, n // 2)
    return range(1, (n - 1) // 2 + 1)


def theta(k: int, n: int) -> float:
    """theta_{k,n}; raises when k is outside the index range of J_n."""
    if k not in k_range(n):
        raise ValidationError(f"k={k} is not an index of J_{n} (valid: {list(k_range(n))})")
    if n % 2 == 0:
        return k * math.pi / n
    return (2 * k - 1) * math.pi / (2 * n)


def theta_set(n: int) -> list[float]:
    """J_n in increasing order."""
    return [theta(k, n) for k in k_range(n)]


def winding(k: int, n: int) -> int:
    """Winding number j of the orbit (k, n); its action is 2n*sin(j*pi/n)."""
    theta(k, n)
    return n // 2 - k if n % 2 == 0 else (n + 1) // 2 - k


def _k_from_winding(j: int, n: int) -> int:
    return n // 2 - j if n % 2 == 0 else (n + 1) // 2 - j


def bouncing_value(k: int, n: int) -> float:
    return 2.0 * n * math.cos(theta(k, n))


# ── enumeration ──────────────────────────────────────────────────────────────

def enumerate_spectrum(
    M: float,
    include_gliding: bool = True,
    n_cap: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SpectrumTable:
    """All elements with value <= M, branch by branch.

    Winding j starts at n = 2j with value 4j and increases with n, so a branch
    is finished as soon as one value exceeds M.  Branches with 2*j*pi <= M never
    finish; they stop at the n-cap and are listed in `truncated_windings`.
    """
    if not M > 0:
        raise ValidationError(f"M must be positive, got {M}")
    cap = max(n_cap or tolerances.spectrum_n_cap, math.ceil(M / 2) + 8)
    table = SpectrumTable(bound=M, n_cap=cap)

    for j in range(1, int(M // 4) + 1):
        n = 2 * j
        while True:
            if n > cap:
                table.truncated_windings.append(j)
                break
            k = _k_from_winding(j, n)
            value = bouncing_value(k, n)
            if value > M:
                break
            table.elements.append(SpectrumElement(value, Bouncing(k, n)))
            n += 1

    if include_gliding:
        for n in range(1, int(M // TWO_PI) + 1):
            table.elements.append(SpectrumElement(TWO_PI * n, Gliding(n)))

    table.elements.sort(key=lambda e: (e.value, e.n, e.k if e.k is not None else -1))
    if table.truncated_windings:
        log.warning(
            "spectrum below %.6g truncated at n=%d on windings %s (values accumulate at 2*j*pi)",
            M, cap, table.truncated_windings,
        )
    return table


def spectrum_up_to(
    M: float,
    include_gliding: bool = True,
    n_cap: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> list[SpectrumElement]:
    """Sorted elements of the spectrum with value <= M; equal values keep every label."""
    return enumerate_spectrum(M, include_gliding, n_cap, tolerances).elements


def distinct_values(elements: Iterable[Union[SpectrumElement, float]], tol: float) -> list[float]:
    values = sorted(_value(e) for e in elements)
    out: list[float] = []
    for v in values:
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def kth_smallest(k: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> SpectrumElement:
    """k-th smallest action, counted without multiplicity.

    The winding-1 branch 2n*sin(pi/n) stays below 2*pi while every other
    element is at least 2*pi, so the answer is the branch value at n = k+1;
    it is still read off an enumeration to keep one code path.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    bound = 2.0 * (k + 1) * math.sin(math.pi / (k + 1))
    table = enumerate_spectrum(
        bound * (1 + 1e-14), include_gliding=True, n_cap=k + 2, tolerances=tolerances,
    )
    values = distinct_values(table.elements, tolerances.value_tol)
    target = values[k - 1]
    return min(
        (e for e in table.elements if abs(e.value - target) <= tolerances.value_tol),
        key=lambda e: e.n,
    )


def spectrum_gap(lo: float, hi: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[SpectrumElement]:
    """Elements strictly between lo and hi, for hi below the next accumulation point."""
    if not hi > lo:
        raise ValidationError("need lo < hi")
    table = enumerate_spectrum(hi, tolerances=tolerances)
    return [e for e in table.elements if lo < e.value < hi]


def _value(e: Union[SpectrumElement, float]) -> float:
    return e.value if isinstance(e, SpectrumElement) else float(e)


def in_gliding_band(value: float, eps: float) -> bool:
    q = round(value / TWO_PI)
    return q >= 1 and abs(value - TWO_PI * q) <= eps


def sigma_truncated(
    elements: Iterable[Union[SpectrumElement, float]],
    M: float,
    eps: float,
) -> list:
    """Values <= M with the closed bands [2k*pi - eps, 2k*pi + eps], k >= 1, removed."""
    if not M > 0:
        raise ValidationError(f"M must be positive, got {M}")
    if not 0 < eps < math.pi:
        raise ValidationError(f"eps must lie in (0, pi), got {eps}")
    kept = [e for e in elements if _value(e) <= M and not in_gliding_band(_value(e), eps)]
    return sorted(kept, key=_value)


# ── billiard orbits ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class BilliardOrbit:
    """Closed billiard trajectory in the unit circle, vertices as angles."""

    vertices: tuple[float, ...]
    theta: float
    chord_length: float
    total_length: float
    label: Optional[Bouncing] = None

    @property
    def step(self) -> float:
        return math.pi + 2.0 * self.theta

    def points(self) -> np.ndarray:
        v = np.asarray(self.vertices)
        return np.column_stack([np.cos(v), np.sin(v)])

    def perimeter(self) -> float:
        """Polygon perimeter measured from the vertices themselves."""
        pts = self.points()
        return float(np.sum(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)))

    def closure_gap(self) -> float:
        """Angular distance between the vertex after the last chord and the first vertex."""
        nxt = self.vertices[-1] + self.step
        d = (nxt - self.vertices[0]) % (2 * math.pi)
        return min(d, 2 * math.pi - d)


def billiard_orbit(k: int, n: int, tolerances: Tolerances = DEFAULT_TOLERANCES) -> BilliardOrbit:
    """The orbit with n chords and incidence angle theta_{k,n}."""
    th = theta(k, n)
    step = math.pi + 2.0 * th
    vertices = tuple((i * step) % (2 * math.pi) for i in range(n))
    chord = 2.0 * math.cos(th)
    orbit = BilliardOrbit(vertices, th, chord, n * chord, Bouncing(k, n))
    if orbit.closure_gap() > tolerances.closure_tol:
        raise ValidationError(f"orbit ({k}, {n}) does not close (gap {orbit.closure_gap():.3e})")
    return orbit


def lift_to_characteristic(
    orbit: BilliardOrbit,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CharacteristicPath:
    """Closed characteristic on the boundary of the bidisc over a billiard orbit.

    x runs along the chords a_m -> a_{m+1} while y rests at -u_m (u_m the chord
    direction); then x rests at a_{m+1} while y runs from -u_m to -u_{m+1}
    along a_{m+1}.  Junctions are P_{2m} = ((-1)^m e^{2im theta}, (-1)^m e^{i(2m+1)theta}).
    """
    if len(orbit.vertices) < 2 or orbit.closure_gap() > tolerances.closure_tol:
        raise ValidationError("lift_to_characteristic needs a closed billiard orbit")

    a = orbit.points()
    m = len(a)
    chords = np.roll(a, -1, axis=0) - a
    u = chords / np.linalg.norm(chords, axis=1, keepdims=True)
    b = -u

    corners = []
    for i in range(m):
        corners.append(np.concatenate([a[i], b[i]]))
        corners.append(np.concatenate([a[(i + 1) % m], b[i]]))
    corners.append(corners[0])
    points = np.array(corners)
    times = np.arange(len(points), dtype=float)

    action = segment_action(points[:-1])
    return CharacteristicPath(
        times=times,
        points=points,
        period=float(times[-1]),
        action=action,
        closure_residual=float(np.linalg.norm(points[-1] - points[0])),
        piecewise_linear=True,
    )
