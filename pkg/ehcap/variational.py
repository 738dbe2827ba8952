"""Truncated Fourier loops, the action functionals on them, and the test families.

A loop is f(t) = sum_{|k| <= K} f_k e^{2 pi i k t} with f_k in C^2.  The
quantity controlling Psi_c is the gauge of the bidisc along the loop,

    r(z) = (|z1|^2 + |z2|^2)/2 + |Re(z1^2 + z2^2)|/2,

so everything reduces to the trigonometric polynomial q = Re(z1^2 + z2^2),
whose coefficients are exact convolutions of the f_k.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import mpmath
import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import ValidationError
from .geometry import ApproximantParams, gauge_bidisc, gauge_Dn
from .spectrum import SpectrumElement
from .suggest import hint

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


# ── loops ────────────────────────────────────────────────────────────────────

@dataclass
class FourierLoop:
    """Coefficients f_{-K} ... f_K stored as rows; row k + K holds f_k."""

    K: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.K < 0:
            raise ValidationError("truncation order K must be >= 0")
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim == 1:
            self.coeffs = self.coeffs[:, None]
        if self.coeffs.shape[0] != 2 * self.K + 1:
            raise ValidationError(f"expected {2 * self.K + 1} coefficient rows, got {self.coeffs.shape[0]}")

    @classmethod
    def zeros(cls, K: int, dim: int = 2) -> "FourierLoop":
        return cls(K, np.zeros((2 * K + 1, dim), dtype=complex))

    @classmethod
    def from_modes(cls, modes: Mapping[int, Sequence[complex]], K: Optional[int] = None, dim: int = 2) -> "FourierLoop":
        K = max([abs(k) for k in modes] + [K or 0])
        loop = cls.zeros(K, dim)
        for k, v in modes.items():
            loop.coeffs[k + K] = v
        return loop

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def coeff(self, k: int) -> np.ndarray:
        if abs(k) > self.K:
            return np.zeros(self.dim, dtype=complex)
        return self.coeffs[k + self.K]

    def padded(self, K: int) -> "FourierLoop":
        if K < self.K:
            raise ValidationError("cannot pad to a smaller truncation order")
        out = FourierLoop.zeros(K, self.dim)
        out.coeffs[K - self.K:K + self.K + 1] = self.coeffs
        return out

    def __add__(self, other: "FourierLoop") -> "FourierLoop":
        K = max(self.K, other.K)
        return FourierLoop(K, self.padded(K).coeffs + other.padded(K).coeffs)

    def __mul__(self, scale: complex) -> "FourierLoop":
        return FourierLoop(self.K, self.coeffs * scale)

    __rmul__ = __mul__

    def _masked(self, keep: np.ndarray) -> "FourierLoop":
        return FourierLoop(self.K, np.where(keep[:, None], self.coeffs, 0.0))

    def plus(self) -> "FourierLoop":
        """P+: frequencies k > 0."""
        return self._masked(self.frequencies > 0)

    def zero(self) -> "FourierLoop":
        """P0: the constant term."""
        return self._masked(self.frequencies == 0)

    def minus(self) -> "FourierLoop":
        """P-: frequencies k < 0."""
        return self._masked(self.frequencies < 0)

    def phase_shift(self, theta: float) -> "FourierLoop":
        """T_theta f(t) = f(t + theta)."""
        rot = np.exp(2j * math.pi * self.frequencies * theta)
        return FourierLoop(self.K, self.coeffs * rot[:, None])

    def to_rows(self) -> list[dict]:
        """CSV rows k, Re f_k^1, Im f_k^1, ... for dumps."""
        rows = []
        for k, v in zip(self.frequencies.tolist(), self.coeffs):
            row: dict = {"k": k}
            for j, c in enumerate(v, start=1):
                row[f"re{j}"], row[f"im{j}"] = float(c.real), float(c.imag)
            rows.append(row)
        return rows


def eval_loop(f: FourierLoop, t) -> np.ndarray:
    """f(t) for scalar or array t; the result has a trailing axis of length dim."""
    t = np.asarray(t, dtype=float)
    phases = np.exp(2j * math.pi * np.multiply.outer(t, f.frequencies))
    return phases @ f.coeffs


def loop_points(f: FourierLoop, t) -> np.ndarray:
    """Samples of a C^2 loop in the (x1, x2, y1, y2) layout."""
    z = eval_loop(f, t)
    return np.concatenate([z.real, z.imag], axis=-1)


def action_A(f: FourierLoop) -> float:
    """pi * sum_k k |f_k|^2."""
    weights = np.sum(np.abs(f.coeffs) ** 2, axis=1)
    return float(math.pi * np.dot(f.frequencies, weights))


def e_inner(f: FourierLoop, g: FourierLoop) -> float:
    """Re<f_0, g_0> + 2 pi sum_k |k| Re<f_k, g_k>."""
    K = max(f.K, g.K)
    a, b = f.padded(K), g.padded(K)
    dots = np.real(np.sum(a.coeffs * np.conj(b.coeffs), axis=1))
    w = np.where(a.frequencies == 0, 1.0, TWO_PI * np.abs(a.frequencies))
    return float(np.dot(w, dots))


def l2_norm_sq(f: FourierLoop) -> float:
    return float(np.sum(np.abs(f.coeffs) ** 2))


# ── Re(z1^2 + z2^2) ──────────────────────────────────────────────────────────

def _square_coeffs(f: FourierLoop) -> np.ndarray:
    """Coefficients s_m, |m| <= 2K, of z1^2 + z2^2 (bilinear, no conjugation)."""
    s = np.zeros(4 * f.K + 1, dtype=complex)
    for d in range(f.dim):
        s += np.convolve(f.coeffs[:, d], f.coeffs[:, d])
    return s


def _re_square_coeffs(f: FourierLoop) -> np.ndarray:
    """Coefficients a_m of q = Re(z1^2 + z2^2): a_m = (s_m + conj(s_{-m}))/2."""
    s = _square_coeffs(f)
    return 0.5 * (s + np.conj(s[::-1]))


def fourier_coeff_re_sq(f: FourierLoop, order: int) -> complex:
    """Coefficient of e^{2 pi i order t} in Re(z1^2 + z2^2)."""
    if abs(order) > 4 * f.K:
        raise ValidationError(f"order {order} exceeds 4K = {4 * f.K}")
    if abs(order) > 2 * f.K:
        return 0j
    return complex(_re_square_coeffs(f)[order + 2 * f.K])


class _TrigPoly:
    """Real trigonometric polynomial a_0 + 2 sum_{m>0} Re(a_m e^{2 pi i m t})."""

    def __init__(self, a: np.ndarray):
        D = (len(a) - 1) // 2
        self.degree = D
        self.a0 = float(a[D].real)
        self.pos = a[D + 1:]
        self.m = np.arange(1, D + 1)

    def __call__(self, t: np.ndarray) -> np.ndarray:
        if self.degree == 0:
            return np.full(np.shape(t), self.a0)
        e = np.exp(2j * math.pi * np.multiply.outer(t, self.m))
        return self.a0 + 2.0 * np.real(e @ self.pos)

    def antiderivative(self, t: np.ndarray) -> np.ndarray:
        if self.degree == 0:
            return self.a0 * t
        e = np.exp(2j * math.pi * np.multiply.outer(t, self.m))
        return self.a0 * t + 2.0 * np.real(e @ (self.pos / (2j * math.pi * self.m)))

    def abs_integral(self, grid: int, iterations: int = 52) -> float:
        """Integral of |q| over one period, split at the sign changes of q."""
        t = np.arange(grid) / grid
        v = self(t)
        nxt = np.roll(v, -1)
        change = np.nonzero(v * nxt < 0.0)[0]
        zero_nodes = t[v == 0.0]
        if change.size:
            lo, hi = t[change], t[change] + 1.0 / grid
            f_lo = v[change]
            for _ in range(iterations):
                mid = 0.5 * (lo + hi)
                f_mid = self(mid)
                left = np.sign(f_mid) == np.sign(f_lo)
                lo = np.where(left, mid, lo)
                f_lo = np.where(left, f_mid, f_lo)
                hi = np.where(left, hi, mid)
            roots = 0.5 * (lo + hi)
        else:
            roots = np.empty(0)
        roots = np.sort(np.concatenate([roots, zero_nodes]))
        if roots.size == 0:
            return abs(self.a0)
        ends = np.append(roots[1:], roots[0] + 1.0)
        return float(np.sum(np.abs(self.antiderivative(ends) - self.antiderivative(roots))))


def _grid_size(f: FourierLoop, nodes: Optional[int], tolerances: Tolerances) -> int:
    D = 2 * f.K
    return max(nodes or 0, 4 * f.K + 4, tolerances.psi_oversample * 2 * (D + 1))


def gauge_integral(f: FourierLoop, nodes: Optional[int] = None, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Integral over one period of the bidisc gauge along f."""
    if f.dim != 2:
        raise ValidationError("gauge integrals need C^2-valued loops")
    q = _TrigPoly(_re_square_coeffs(f))
    return 0.5 * l2_norm_sq(f) + 0.5 * q.abs_integral(_grid_size(f, nodes, tolerances))


def psi_c(
    f: FourierLoop,
    c: float,
    nodes: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Psi_c(f) = A(f) - c * int_0^1 r(f(t)) dt.

    The |Re(z1^2 + z2^2)| part is integrated piece by piece between the roots
    of the trigonometric polynomial, so only root location is approximate.
    """
    return action_A(f) - c * gauge_integral(f, nodes, tolerances)


def _periodic_mean(values: np.ndarray) -> float:
    return float(np.mean(values))


def psi_c_approximant(
    f: FourierLoop,
    c: float,
    params: ApproximantParams,
    nodes: int = 512,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """A(f) - c * int (1 + 1/n) r_n(f(t)) dt, which never exceeds psi_c(f)."""
    pts = loop_points(f, np.arange(nodes) / nodes)
    gauges = np.array([gauge_Dn(p, params, tolerances) if np.any(p) else 0.0 for p in pts])
    return action_A(f) - c * params.outer_sq * _periodic_mean(gauges)


# ── ramps and H-actions ──────────────────────────────────────────────────────

def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


@dataclass(frozen=True)
class RampProfile:
    """f(s) = 0 for s <= 1, then f' rises as a smoothstep to c + eps across [1, 1 + width]."""

    c: float
    eps: float = 0.0
    width: float = 1e-3

    def __post_init__(self) -> None:
        if self.c <= 0 or self.eps < 0 or self.width <= 0:
            raise ValidationError("ramp needs c > 0, eps >= 0 and width > 0")

    @property
    def slope(self) -> float:
        return self.c + self.eps

    @property
    def s_knots(self) -> tuple[float, float]:
        return 1.0, 1.0 + self.width

    def derivative(self, s):
        return self.slope * _smoothstep((np.asarray(s, dtype=float) - 1.0) / self.width)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        x = np.clip((s - 1.0) / self.width, 0.0, 1.0)
        bend = self.slope * self.width * (x ** 3 - 0.5 * x ** 4)
        tail = self.slope * np.maximum(s - 1.0 - self.width, 0.0)
        out = bend + tail
        return float(out) if out.ndim == 0 else out


@dataclass
class CriticalValues:
    crossed: list[tuple[float, float, float]] = field(default_factory=list)
    uncrossed: list[float] = field(default_factory=list)


def ramp_critical_values(
    spectrum: Iterable[Union[SpectrumElement, float]],
    ramp: RampProfile,
) -> CriticalValues:
    """(s_j, alpha_j, s_j alpha_j - f(s_j)) where f'(s_j) = alpha_j."""
    out = CriticalValues()
    lo, hi = ramp.s_knots
    for e in spectrum:
        alpha = e.value if isinstance(e, SpectrumElement) else float(e)
        if not 0.0 < alpha < ramp.slope:
            out.uncrossed.append(alpha)
            continue
        s = brentq(lambda x: float(ramp.derivative(x)) - alpha, lo, hi, xtol=1e-15, rtol=1e-14)
        out.crossed.append((s, alpha, s * alpha - float(ramp(s))))
    return out


def action_H(f: FourierLoop, ramp: RampProfile, nodes: int = 2048) -> float:
    """A(f) - int ramp(r(f(t))) dt, periodic trapezoid."""
    pts = loop_points(f, np.arange(nodes) / nodes)
    return action_A(f) - _periodic_mean(ramp(gauge_bidisc(pts)))


# ── test families ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GammaProfile:
    """gamma0 for |a^2 + b^2| <= delta_lo, 0 beyond delta_hi, linear between."""

    gamma0: float = 0.23
    delta_lo: float = 0.49
    delta_hi: float = 0.6

    def __post_init__(self) -> None:
        if not 0 < self.delta_lo < self.delta_hi:
            raise ValidationError("need 0 < delta_lo < delta_hi")

    def __call__(self, delta):
        ramp = (self.delta_hi - np.asarray(delta, dtype=float)) / (self.delta_hi - self.delta_lo)
        out = self.gamma0 * np.clip(ramp, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out


def projective_delta(alpha: complex, beta: complex) -> float:
    """|alpha^2 + beta^2| after normalizing |alpha|^2 + |beta|^2 = 1."""
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if norm == 0.0:
        raise ValidationError("(alpha, beta) must be nonzero")
    return abs(alpha * alpha + beta * beta) / norm


def gamma_profile(
    alpha: complex,
    beta: complex,
    gamma0: float = 0.23,
    delta_lo: float = 0.49,
    delta_hi: float = 0.6,
) -> float:
    return GammaProfile(gamma0, delta_lo, delta_hi)(projective_delta(alpha, beta))


def _tail_loop(tail: Union[None, FourierLoop, Mapping[int, Sequence[complex]]]) -> FourierLoop:
    if tail is None:
        return FourierLoop.zeros(0)
    loop = tail if isinstance(tail, FourierLoop) else FourierLoop.from_modes(tail)
    if np.any(loop.plus().coeffs):
        raise ValidationError("tail must live in E0 + E- (frequencies <= 0)")
    return loop


def build_W2_element(
    alpha: complex,
    beta: complex,
    tail=None,
    profile: GammaProfile = GammaProfile(),
) -> FourierLoop:
    """(a, b) e^{2 pi i t} + gamma (a^3/|a|^3)(conj a, conj b) e^{4 pi i t} + tail."""
    gamma = profile(projective_delta(alpha, beta))
    head = FourierLoop.from_modes({1: (alpha, beta)}, K=2)
    if gamma != 0.0:
        if alpha == 0:
            raise ValidationError("alpha must be nonzero where the gamma profile is")
        phase = alpha ** 3 / abs(alpha) ** 3
        head.coeffs[2 + 2] = gamma * phase * np.conj([alpha, beta])
    return head + _tail_loop(tail)


def build_W3_element(alpha: complex, beta: complex, gamma: complex, tail=None) -> FourierLoop:
    """(a e^{2 pi i t} + g e^{4 pi i t}, b e^{2 pi i t}) + tail."""
    head = FourierLoop.from_modes({1: (alpha, beta), 2: (gamma, 0.0)})
    return head + _tail_loop(tail)


def w3_head_action(alpha: complex, beta: complex, gamma: complex) -> float:
    return math.pi * (abs(alpha) ** 2 + abs(beta) ** 2 + 2 * abs(gamma) ** 2)


# ── certificates ─────────────────────────────────────────────────────────────

CASES = ("I6", "I4", "I8")


@dataclass(frozen=True)
class CertificateCoefficients:
    """Quadratic inequality behind one case of the negativity argument.

    I6:  A g^2 + B g + C < 0 in the amplitude g of the second harmonic.
    I4:  C + B delta + A g^2 < 0 with delta = |a^2 + b^2|.
    I8:  C < 0 and A < 0 (the (a, b) and the g weights); B is 0.
    """

    case: str
    c: float
    A: float
    B: float
    C: float

    def evaluate(self, gamma: float, delta: float = 0.0) -> float:
        if self.case == "I4":
            return self.C + self.B * delta + self.A * gamma * gamma
        if self.case == "I8":
            return max(self.A, self.C)
        return self.A * gamma * gamma + self.B * gamma + self.C

    def gamma_roots(self) -> tuple[float, ...]:
        """Real roots of A g^2 + B g + C (I6 only), ascending."""
        if self.case != "I6":
            raise ValidationError("gamma roots exist for the I6 case only")
        disc = self.B * self.B - 4 * self.A * self.C
        if disc < 0:
            return ()
        sq = math.sqrt(disc)
        return tuple(sorted(((-self.B - sq) / (2 * self.A), (-self.B + sq) / (2 * self.A))))

    def delta_root(self, gamma: float) -> float:
        """delta at which the I4 expression vanishes for this gamma."""
        if self.case != "I4":
            raise ValidationError("delta root exists for the I4 case only")
        return (self.C + self.A * gamma * gamma) / -self.B

    @property
    def holds(self) -> Optional[bool]:
        return self.A < 0 and self.C < 0 if self.case == "I8" else None

    def to_dict(self) -> dict:
        d = {"case": self.case, "c": self.c, "A": self.A, "B": self.B, "C": self.C}
        if self.case == "I6":
            d["gamma_roots"] = list(self.gamma_roots())
        if self.case == "I8":
            d["holds"] = self.holds
            d["threshold"] = float(i8_threshold())
        return d


def _i8_lhs(c, pi):
    q = (c / 4) ** 2
    return pi - c / 2 + q / (c / 2 + 5 * pi), 2 * pi - c / 2 - c / 4 + q / (c / 2 + 6 * pi)


def certificate_coefficients(case: str, c: float) -> CertificateCoefficients:
    if case not in CASES:
        raise ValidationError(f"unknown certificate case {case!r}{hint(case, CASES)}")
    if not c > 0:
        raise ValidationError("c must be positive")
    pi, q = math.pi, (c / 4) ** 2
    if case == "I6":
        return CertificateCoefficients(
            case, c,
            A=2 * pi - c / 2 + q / (c / 2 + 5 * pi),
            B=-c / 2,
            C=pi - c / 2 + q / (c / 2 + 4 * pi),
        )
    if case == "I4":
        return CertificateCoefficients(
            case, c,
            A=2 * pi - c / 2 + (c / 4) * (c / 2 + 2 * pi) / (3 * c / 4 + 4 * pi) + q / (c / 2 + 4 * pi),
            B=-c / 4,
            C=pi - c / 2 + q / (c / 2 + 3 * pi),
        )
    first, second = _i8_lhs(c, pi)
    return CertificateCoefficients(case, c, A=second, B=0.0, C=first)


def i8_threshold(dps: int = 30) -> mpmath.mpf:
    """Smallest c making both I8 weights negative, to `dps` digits.

    The second weight decides it: 5c^2 + 56 pi c - 192 pi^2 > 0, root 4 pi (sqrt(109) - 7)/5.
    """
    with mpmath.workdps(dps):
        roots = [
            mpmath.findroot(lambda c, i=i: _i8_lhs(c, mpmath.pi)[i], guess)
            for i, guess in ((0, 6.5), (1, 8.6))
        ]
        closed = 4 * mpmath.pi * (mpmath.sqrt(109) - 7) / 5
        if abs(max(roots) - closed) > mpmath.mpf(10) ** (-dps + 5):
            log.warning("I8 threshold root %s disagrees with closed form %s", max(roots), closed)
        return +max(roots)


@dataclass
class GammaCertificate:
    c: float
    profile: GammaProfile
    i6_roots: tuple[float, ...]
    delta_star: float
    uncovered: list[float] = field(default_factory=list)

    @property
    def plateau_ok(self) -> bool:
        """The plateau edge sits below the recomputed I4 root at gamma0."""
        return self.profile.delta_lo < self.delta_star

    @property
    def ok(self) -> bool:
        return not self.uncovered

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "gamma0": self.profile.gamma0,
            "delta_lo": self.profile.delta_lo,
            "delta_hi": self.profile.delta_hi,
            "i6_roots": list(self.i6_roots),
            "delta_star": self.delta_star,
            "plateau_ok": self.plateau_ok,
            "uncovered": self.uncovered,
            "ok": self.ok,
        }


def certify_gamma_profile(c: float, profile: GammaProfile = GammaProfile(), grid: int = 2001) -> GammaCertificate:
    """Check that each delta in [0, 1] is covered by the I6 window or by the I4 inequality."""
    i6 = certificate_coefficients("I6", c)
    i4 = certificate_coefficients("I4", c)
    roots = i6.gamma_roots()
    cert = GammaCertificate(c, profile, roots, i4.delta_root(profile.gamma0))
    for delta in np.linspace(0.0, 1.0, grid).tolist():
        g = profile(delta)
        in_window = len(roots) == 2 and roots[0] < g < roots[1]
        if not in_window and not i4.evaluate(g, delta) < 0.0:
            cert.uncovered.append(delta)
    if cert.uncovered:
        log.info("gamma profile leaves %d of %d deltas uncovered at c=%.6g", len(cert.uncovered), grid, c)
    return cert


# ── Monte-Carlo scans ────────────────────────────────────────────────────────

FAMILIES = ("W2", "W3")


@dataclass
class ScanReport:
    """Sampling evidence for the sign of Psi_c on a family, not a proof."""

    family: str
    c: float
    samples: int
    K_tail: int
    seed: int
    max_psi: float = -math.inf
    argmax: dict = field(default_factory=dict)
    violations: int = 0
    evidence: str = "sampling evidence"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "c": self.c,
            "samples": self.samples,
            "K_tail": self.K_tail,
            "seed": self.seed,
            "max_psi": self.max_psi,
            "argmax": self.argmax,
            "violations": self.violations,
            "evidence": self.evidence,
        }


def _complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_tail(rng: np.random.Generator, K_tail: int, budget: float) -> FourierLoop:
    """Tail in E0 + E- with E-norm squared uniform in [0, budget]."""
    loop = FourierLoop.zeros(K_tail)
    loop.coeffs[:K_tail + 1] = _complex_normal(rng, (K_tail + 1, 2))
    norm = e_inner(loop, loop)
    if norm == 0.0:
        return loop
    return loop * math.sqrt(rng.uniform(0.0, budget) / norm)


def _scan_chunk(family, c, count, K_tail, tail_scale, profile, rng, tolerances):
    best, best_args, bad = -math.inf, {}, 0
    for _ in range(count):
        if family == "W2":
            a, b = _complex_normal(rng, 2)
            norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
            a, b = a / norm, b / norm
            head = build_W2_element(a, b, profile=profile)
            args = {"alpha": [a.real, a.imag], "beta": [b.real, b.imag]}
        else:
            a, b, g = _complex_normal(rng, 3)
            norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(g) ** 2)
            a, b, g = a / norm, b / norm, g / norm
            head = build_W3_element(a, b, g)
            args = {"alpha": [a.real, a.imag], "beta": [b.real, b.imag], "gamma": [g.real, g.imag]}
        tail = random_tail(rng, K_tail, tail_scale * e_inner(head, head)) if K_tail else None
        value = psi_c(head + _tail_loop(tail), c, tolerances=tolerances)
        if value >= 0.0:
            bad += 1
        if value > best:
            best, best_args = value, args
    return best, best_args, bad


def negativity_scan(
    family: str,
    c: float,
    samples: int,
    K_tail: int = 8,
    seed: int = 0,
    tail_scale: float = 4.0,
    profile: GammaProfile = GammaProfile(),
    chunks: int = 8,
    workers: int = 1,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ScanReport:
    """Largest Psi_c over random family elements normalized to a unit head.

    Chunks draw from independent children of one SeedSequence, so a seed fixes
    the report whatever the worker count.
    """
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}{hint(family, FAMILIES)}")
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    chunks = max(1, min(chunks, samples))
    sizes = [samples // chunks + (i < samples % chunks) for i in range(chunks)]
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(chunks)]

    def run(i: int):
        return _scan_chunk(family, c, sizes[i], K_tail, tail_scale, profile, rngs[i], tolerances)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(chunks)))
    else:
        results = [run(i) for i in range(chunks)]

    report = ScanReport(family, c, samples, K_tail, seed)
    for best, args, bad in results:
        report.violations += bad
        if best > report.max_psi:
            report.max_psi, report.argmax = best, args
    log.info("%s scan at c=%.6g: max psi %.6g, %d violations", family, c, report.max_psi, report.violations)
    return report


# ── coefficient bound ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class L1Bound:
    lhs: float
    rhs: float
    holds: bool

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def l1_coeff_bound(f: FourierLoop, n: int, nodes: Optional[int] = None, tolerances: Tolerances = DEFAULT_TOLERANCES) -> L1Bound:
    """int_0^1 |f(t)| dt against |f_n|."""
    if abs(n) > f.K:
        raise ValidationError(f"|n| must not exceed K = {f.K}")
    nodes = nodes or tolerances.l1_nodes
    values = eval_loop(f, np.arange(nodes) / nodes)
    lhs = _periodic_mean(np.linalg.norm(values, axis=-1))
    rhs = float(np.linalg.norm(f.coeff(n)))
    return L1Bound(lhs, rhs, lhs >= rhs - tolerances.l1_slack)
