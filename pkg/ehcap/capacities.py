"""Ekeland-Hofer capacity sequences of standard domains, products, and obstructions.

Values are intervals so that an unknown capacity (the even bidisc entries past
k = 2) can still take part in certified comparisons: an obstruction is only
claimed when two intervals are strictly disjoint.
"""
from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

from .errors import ValidationError
from .suggest import hint

log = logging.getLogger(__name__)

SQRT27 = 3.0 * math.sqrt(3.0)


# ── domains ──────────────────────────────────────────────────────────────────

KINDS = {
    "bidisc": 0,
    "ball": 1,
    "ellipsoid": 2,
    "complex-bidisc": (0, 1),
    "disc": 1,
    "polydisc": 2,
    "approximant": 1,
}


@dataclass(frozen=True)
class DomainSpec:
    """A domain whose capacity sequence is known, or a product of such domains.

    ball:a and ellipsoid:a,b take areas (E(a, b) = {pi(|z1|^2/a + |z2|^2/b) <= 1});
    disc:R and complex-bidisc:s take radii.
    """

    kind: str
    params: tuple[float, ...] = ()
    factors: tuple["DomainSpec", ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "product":
            if not self.factors:
                raise ValidationError("a product needs at least one factor")
            return
        if self.kind not in KINDS:
            raise ValidationError(f"unknown domain kind {self.kind!r}{hint(self.kind, KINDS)}")
        arity = KINDS[self.kind]
        allowed = arity if isinstance(arity, tuple) else (arity,)
        if len(self.params) not in allowed:
            raise ValidationError(f"{self.kind} takes {' or '.join(map(str, allowed))} parameter(s), got {len(self.params)}")
        if any(not (p > 0 and math.isfinite(p)) for p in self.params):
            raise ValidationError(f"{self.kind} parameters must be positive, got {self.params}")
        if self.kind == "approximant" and int(self.params[0]) != self.params[0]:
            raise ValidationError("approximant index n must be an integer")

    # constructors

    @classmethod
    def bidisc(cls) -> "DomainSpec":
        return cls("bidisc")

    @classmethod
    def ball(cls, a: float) -> "DomainSpec":
        return cls("ball", (float(a),))

    @classmethod
    def ellipsoid(cls, a: float, b: float) -> "DomainSpec":
        return cls("ellipsoid", (float(a), float(b)))

    @classmethod
    def complex_bidisc(cls, scale: float = 1.0) -> "DomainSpec":
        return cls("complex-bidisc", (float(scale),))

    @classmethod
    def disc(cls, R: float) -> "DomainSpec":
        return cls("disc", (float(R),))

    @classmethod
    def polydisc(cls, a: float, b: float) -> "DomainSpec":
        return cls("polydisc", (float(a), float(b)))

    @classmethod
    def approximant(cls, n: int) -> "DomainSpec":
        return cls("approximant", (float(n),))

    @classmethod
    def product(cls, *factors: "DomainSpec") -> "DomainSpec":
        flat: list[DomainSpec] = []
        for f in factors:
            flat.extend(f.factors if f.kind == "product" else (f,))
        return cls("product", factors=tuple(flat))

    def __mul__(self, other: "DomainSpec") -> "DomainSpec":
        return DomainSpec.product(self, other)

    @classmethod
    def parse(cls, text: str) -> "DomainSpec":
        """Parse `bidisc`, `ball:4`, `ellipsoid:4,5.196`, `disc:0.95`, ... joined by `*`."""
        parts = [p.strip() for p in text.split("*")]
        if not all(parts):
            raise ValidationError(f"empty factor in domain {text!r}")
        domains = [cls._parse_one(p) for p in parts]
        return domains[0] if len(domains) == 1 else cls.product(*domains)

    @classmethod
    def _parse_one(cls, text: str) -> "DomainSpec":
        kind, _, rest = text.partition(":")
        kind = kind.strip().lower()
        if kind not in KINDS:
            raise ValidationError(f"unknown domain kind {kind!r}{hint(kind, KINDS)}")
        params = tuple(_number(v) for v in rest.split(",")) if rest.strip() else ()
        if kind == "complex-bidisc" and not params:
            params = (1.0,)
        return cls(kind, params)

    def label(self) -> str:
        if self.kind == "product":
            return " x ".join(f.label() for f in self.factors)
        if not self.params:
            return self.kind
        return f"{self.kind}:{','.join(f'{p:g}' for p in self.params)}"


def _number(text: str) -> float:
    """Float literal, optionally followed by `pi` (`2pi`, `pi`)."""
    t = text.strip().lower()
    scale = 1.0
    if t.endswith("pi"):
        t, scale = t[:-2].strip() or "1", math.pi
    try:
        return float(t) * scale
    except ValueError as exc:
        raise ValidationError(f"not a number: {text!r}") from exc


# ── intervals ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CapacityInterval:
    k: int
    lower: float
    upper: float
    provenance: str = ""

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValidationError(f"empty capacity interval [{self.lower}, {self.upper}] at k={self.k}")

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_dict(self) -> dict:
        return {"k": self.k, "lower": self.lower, "upper": self.upper, "exact": self.exact, "provenance": self.provenance}


def _exact(k: int, v: float, provenance: str) -> CapacityInterval:
    return CapacityInterval(k, v, v, provenance)


def _check_kmax(kmax: int) -> None:
    if isinstance(kmax, bool) or not isinstance(kmax, int) or kmax < 1:
        raise ValidationError(f"kmax must be a positive integer, got {kmax!r}")


def _merged_multiples(a: float, b: float, kmax: int) -> list[float]:
    """The kmax smallest elements of the multiset {m a} + {n b}, m, n >= 1."""
    heap = [(a, a, 1), (b, b, 1)]
    out: list[float] = []
    while len(out) < kmax:
        value, step, m = heapq.heappop(heap)
        out.append(value)
        heapq.heappush(heap, ((m + 1) * step, step, m + 1))
    return out


def _bidisc(kmax: int) -> list[CapacityInterval]:
    out = []
    for k in range(1, kmax + 1):
        if k == 2:
            out.append(_exact(k, SQRT27, "theorem"))
        elif k % 2:
            # c_{2n-1} = 4n
            out.append(_exact(k, 2.0 * (k + 1), "theorem" if k <= 3 else "odd formula 4n"))
        else:
            # c_{2n-1} = 4n <= c_{2n} <= c_{2n+1} = 4n + 4
            n = k // 2
            out.append(CapacityInterval(k, 4.0 * n, 4.0 * n + 4.0, "monotone bracket"))
    return out


def known_capacities(domain: DomainSpec, kmax: int) -> list[CapacityInterval]:
    """c_1 ... c_kmax of `domain`."""
    _check_kmax(kmax)
    kind, p = domain.kind, domain.params
    if kind == "product":
        return product_capacities(domain.factors, kmax)
    if kind == "bidisc":
        return _bidisc(kmax)
    if kind in ("ball", "ellipsoid"):
        a, b = (p[0], p[0]) if kind == "ball" else p
        values = _merged_multiples(a, b, kmax)
        return [_exact(k, v, "external formula") for k, v in enumerate(values, start=1)]
    if kind in ("disc", "complex-bidisc"):
        area = math.pi * p[0] ** 2
        return [_exact(k, k * area, "external formula") for k in range(1, kmax + 1)]
    if kind == "polydisc":
        return [_exact(k, k * min(p), "external formula") for k in range(1, kmax + 1)]
    if kind == "approximant":
        # bidisc in D_n in sqrt(1 + 1/n) * bidisc
        stretch = 1.0 + 1.0 / p[0]
        return [
            CapacityInterval(c.k, c.lower, c.upper * stretch, "inclusion bracket")
            for c in _bidisc(kmax)
        ]
    raise ValidationError(f"unsupported domain kind {kind!r}")


def _min_plus(a: Sequence[CapacityInterval], b: Sequence[CapacityInterval], kmax: int) -> list[CapacityInterval]:
    zero = CapacityInterval(0, 0.0, 0.0)
    A, B = [zero, *a], [zero, *b]
    out = []
    for k in range(1, kmax + 1):
        lower = min(A[i].lower + B[k - i].lower for i in range(k + 1))
        upper = min(A[i].upper + B[k - i].upper for i in range(k + 1))
        out.append(CapacityInterval(k, lower, upper, "product rule"))
    return out


def product_capacities(factors: Sequence[DomainSpec], kmax: int) -> list[CapacityInterval]:
    """c_k(A x B) = min over i + j = k of c_i(A) + c_j(B), with c_0 = 0, folded left."""
    _check_kmax(kmax)
    if not factors:
        raise ValidationError("a product needs at least one factor")
    sequences = [known_capacities(f, kmax) for f in factors]
    if len(sequences) == 1:
        return sequences[0]
    return reduce(lambda acc, seq: _min_plus(acc, seq, kmax), sequences[1:], sequences[0])


# ── obstructions ─────────────────────────────────────────────────────────────

@dataclass
class ObstructionReport:
    source: str
    target: str
    kmax: int
    source_values: list[CapacityInterval]
    target_values: list[CapacityInterval]
    violations: list[int] = field(default_factory=list)

    @property
    def first_violation(self) -> Optional[int]:
        return self.violations[0] if self.violations else None

    def summary(self) -> str:
        if self.first_violation is None:
            return f"no obstruction found up to k={self.kmax}"
        k = self.first_violation
        s, t = self.source_values[k - 1], self.target_values[k - 1]
        return f"no embedding {self.source} -> {self.target}: c_{k} {s.lower:.6g} > {t.upper:.6g}"

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "kmax": self.kmax,
            "first_violation": self.first_violation,
            "violations": self.violations,
            "source_values": [c.to_dict() for c in self.source_values],
            "target_values": [c.to_dict() for c in self.target_values],
            "summary": self.summary(),
        }


def obstruction_report(source: DomainSpec, target: DomainSpec, kmax: int) -> ObstructionReport:
    """Every k with certified c_k(source) > c_k(target), which rules out an embedding."""
    src, tgt = known_capacities(source, kmax), known_capacities(target, kmax)
    report = ObstructionReport(source.label(), target.label(), kmax, src, tgt)
    report.violations = [s.k for s, t in zip(src, tgt) if s.lower > t.upper]
    return report


@dataclass
class DistinctionReport:
    R: float
    kmax: int
    separating_k: Optional[int]
    bidisc_side: list[CapacityInterval]
    complex_side: list[CapacityInterval]

    @property
    def area(self) -> float:
        return math.pi * self.R ** 2

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "area": self.area,
            "kmax": self.kmax,
            "separating_k": self.separating_k,
            "bidisc_side": [c.to_dict() for c in self.bidisc_side],
            "complex_side": [c.to_dict() for c in self.complex_side],
        }


def _disjoint(a: CapacityInterval, b: CapacityInterval) -> bool:
    return a.lower > b.upper or a.upper < b.lower


def distinguish_products(R: float, kmax: int) -> DistinctionReport:
    """Smallest k whose capacities certify D^2 x D^2 x Delta_R is not symplectomorphic to Delta^2 x Delta_R."""
    if not 0 < R < 1:
        raise ValidationError(f"R must lie in (0, 1), got {R}")
    disc = DomainSpec.disc(R)
    left = known_capacities(DomainSpec.bidisc() * disc, kmax)
    right = known_capacities(DomainSpec.complex_bidisc() * disc, kmax)
    k = next((a.k for a, b in zip(left, right) if _disjoint(a, b)), None)
    log.debug("R=%.6g (area %.6g): separating k = %s", R, math.pi * R * R, k)
    return DistinctionReport(R, kmax, k, left, right)


@dataclass(frozen=True)
class SeparationThreshold:
    kmax: int
    area: float
    R: float
    separating_k: Optional[int]


def separation_threshold(kmax: int, lo: float = 0.5, hi: float = 0.999, iterations: int = 60) -> SeparationThreshold:
    """Smallest radius, up to bisection precision, separated within kmax.

    An empirical figure for this kmax; it says nothing about sharpness.
    """
    if distinguish_products(lo, kmax).separating_k is not None:
        raise ValidationError(f"R={lo} already separates; lower the search bound")
    top = distinguish_products(hi, kmax)
    if top.separating_k is None:
        raise ValidationError(f"R={hi} does not separate within kmax={kmax}")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        report = distinguish_products(mid, kmax)
        if report.separating_k is None:
            lo = mid
        else:
            hi, top = mid, report
    return SeparationThreshold(kmax, math.pi * hi * hi, hi, top.separating_k)


def embedding_consistency(kmax: int = 3) -> dict[str, bool]:
    """Known embeddings must not be obstructed, and c_3 of the bidisc beats the ball's."""
    bidisc = DomainSpec.bidisc()
    checks = {
        "ball(4) -> bidisc unobstructed": obstruction_report(DomainSpec.ball(4.0), bidisc, kmax).first_violation is None,
        "bidisc -> ellipsoid(4, 3sqrt3) unobstructed": obstruction_report(
            bidisc, DomainSpec.ellipsoid(4.0, SQRT27), kmax).first_violation is None,
        "c_3(bidisc) > c_3(ball(pi))": known_capacities(bidisc, 3)[2].lower > known_capacities(DomainSpec.ball(math.pi), 3)[2].upper,
    }
    for name, ok in checks.items():
        if not ok:
            log.warning("consistency check failed: %s", name)
    return checks
