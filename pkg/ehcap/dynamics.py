"""Characteristic flow on the boundary of D_n, transit defects, and closed orbits.

On the boundary of D_n the characteristic flow is

    x' = -g'(n(|y|^2 - 1)) 2n y,     y' = g'(n(|x|^2 - 1)) 2n x.

Away from the corner region T_n (where both |x|, |y| exceed 1) one of the two
factors vanishes and the motion is a straight chord; only crossings of T_n
need numerical integration.  Each crossing rotates both angles by the same
defect delta_phi, and a characteristic built from m chord pairs closes when
theta + delta_phi is an angle of J_m.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import DOP853, solve_ivp
from scipy.optimize import bisect

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericalError, ValidationError
from .geometry import ApproximantParams, defining_Dn, grad_defining_Dn
from .paths import CharacteristicPath, action_of_path, as_point4
from .spectrum import bouncing_value, in_gliding_band, sigma_truncated, theta

log = logging.getLogger(__name__)

__all__ = [
    "CharacteristicPath", "action_of_path", "PolarState", "PolarTrajectory", "Transit",
    "ShootingResult", "ApproxSpectrumReport", "flow_cartesian", "flow_polar", "polar_rhs",
    "transit", "delta_phi_quad", "delta_phi_ode", "shoot_closed", "approx_spectrum",
    "hausdorff", "trajectory_rows",
]

_MIN_RADIUS = 1e-6
_BOUNDARY_TOL = 1e-10


def _solver_tols(tol: float) -> tuple[float, float]:
    """The integrator runs two orders tighter than the requested per-step tolerance."""
    inner = max(tol * 1e-2, 1e-13)
    return inner, inner


# ── vector fields ────────────────────────────────────────────────────────────

def _cartesian_field(params: ApproximantParams):
    """Flow on D_n plus the action density (x.y' - y.x')/2 as a fifth component."""
    n, p = params.n, params.p
    c = 2.0 * n * p

    def rhs(t, z):
        x1, x2, y1, y2 = z[0], z[1], z[2], z[3]
        sx = n * (x1 * x1 + x2 * x2 - 1.0)
        sy = n * (y1 * y1 + y2 * y2 - 1.0)
        cx = c * sx ** (p - 1) if sx > 0.0 else 0.0
        cy = c * sy ** (p - 1) if sy > 0.0 else 0.0
        dx1, dx2 = -cy * y1, -cy * y2
        dy1, dy2 = cx * x1, cx * x2
        da = 0.5 * (x1 * dy1 + x2 * dy2 - y1 * dx1 - y2 * dx2)
        return [dx1, dx2, dy1, dy2, da]

    return rhs


def _run(rhs, z0, t_end, tol, **kw):
    rtol, atol = _solver_tols(tol)
    sol = solve_ivp(rhs, (0.0, t_end), z0, method="DOP853", rtol=rtol, atol=atol, **kw)
    if sol.status == -1:
        raise NumericalError(f"integration failed: {sol.message}")
    log.debug("DOP853: %d rhs evaluations, %d steps", sol.nfev, len(sol.t))
    return sol


def _max_step(params: ApproximantParams) -> float:
    """Half the shortest chord time."""
    return 0.5 / (params.n * params.p)


def _det(z: np.ndarray) -> float:
    return float(z[0] * z[3] - z[1] * z[2])


def _project(z: np.ndarray, params: ApproximantParams, det0: float, iters: int = 4) -> np.ndarray:
    """Pull (x, y) back onto {H = 0, det = det0} by minimum-norm Gauss-Newton steps."""
    z = np.array(z, dtype=float)
    for _ in range(iters):
        q = z[:4]
        c = np.array([defining_Dn(q, params), _det(q) - det0])
        if np.max(np.abs(c)) <= 1e-15:
            break
        jac = np.vstack([grad_defining_Dn(q, params), [q[3], -q[2], -q[1], q[0]]])
        z[:4] = q - np.linalg.lstsq(jac, c, rcond=None)[0]
    return z


def _run_projected(params: ApproximantParams, z0: np.ndarray, t_end: float, tol: float, t_eval=None):
    """DOP853 on the D_n field, projecting onto the energy and det levels after every accepted step.

    Dense output is taken before the projection, so requested samples are
    projected individually.
    """
    rtol, atol = _solver_tols(tol)
    det0 = _det(z0)
    solver = DOP853(
        _cartesian_field(params), 0.0, z0, t_end,
        rtol=rtol, atol=atol, max_step=_max_step(params),
    )
    ts = None if t_eval is None else np.asarray(t_eval, dtype=float)
    times, states = ([], []) if ts is not None else ([0.0], [np.array(z0, dtype=float)])
    i = 0
    steps = 0
    while solver.status == "running":
        message = solver.step()
        if solver.status == "failed":
            raise NumericalError(f"integration failed: {message}")
        steps += 1
        if ts is not None:
            j = int(np.searchsorted(ts, solver.t, side="right"))
            if j > i:
                dense = solver.dense_output()
                for te, z in zip(ts[i:j], dense(ts[i:j]).T):
                    times.append(float(te))
                    states.append(_project(z, params, det0))
                i = j
        z = _project(solver.y, params, det0)
        solver.y = z
        solver.f = solver.fun(solver.t, z)
        if ts is None:
            times.append(solver.t)
            states.append(z.copy())
    log.debug("projected DOP853: %d steps, %d rhs evaluations", steps, solver.nfev)
    return np.asarray(times), np.asarray(states).T


def _check_on_boundary(pt: np.ndarray, params: ApproximantParams) -> None:
    h = defining_Dn(pt, params)
    if abs(h) > _BOUNDARY_TOL:
        raise ValidationError(f"initial point is not on the boundary of {params.label()} (defining value {h:.3e})")


def flow_cartesian(
    init,
    params: ApproximantParams,
    t_end: float,
    tol: Optional[float] = None,
    n_samples: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CharacteristicPath:
    """Integrate the characteristic flow from a boundary point.

    The returned path carries the accumulated action of the (generally open)
    trajectory; `closure_residual` is the distance between its ends.
    """
    z0 = as_point4(init)
    _check_on_boundary(z0, params)
    tol = tol or tolerances.ode_rtol
    if t_end <= 0:
        raise ValidationError("t_end must be positive")
    t_eval = np.linspace(0.0, t_end, n_samples) if n_samples else None
    times, states = _run_projected(params, np.append(z0, 0.0), t_end, tol, t_eval=t_eval)
    pts = states[:4].T
    return CharacteristicPath(
        times=times,
        points=pts,
        period=float(times[-1]),
        action=float(states[4, -1]),
        closure_residual=float(np.linalg.norm(pts[-1] - pts[0])),
    )


def trajectory_rows(path: CharacteristicPath, params: ApproximantParams) -> list[dict]:
    """Rows t, x1, x2, y1, y2, det, energy for CSV dumps."""
    det = path.det_xy()
    energy = defining_Dn(path.points, params)
    return [
        {"t": t, "x1": p[0], "x2": p[1], "y1": p[2], "y2": p[3], "det": d, "energy": e}
        for (t, p), d, e in zip(path.samples(), det.tolist(), np.atleast_1d(energy).tolist())
    ]


# ── polar form ───────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PolarState:
    """x = r1 e^{i phi1}, y = r2 e^{i phi2}, r3 = x.y."""

    r1: float
    r2: float
    phi1: float
    phi2: float
    r3: float

    def __post_init__(self) -> None:
        if self.r1 < 0 or self.r2 < 0:
            raise ValidationError("radii must be nonnegative")
        scale = max(1.0, self.r1 * self.r2)
        if self.r3 ** 2 > (self.r1 * self.r2) ** 2 + 1e-12 * scale:
            raise ValidationError("r3^2 exceeds r1^2 r2^2")
        if abs(self.r3 - self.r1 * self.r2 * math.cos(self.phi1 - self.phi2)) > 1e-9 * scale:
            raise ValidationError("r3 disagrees with r1 r2 cos(phi1 - phi2)")

    @classmethod
    def from_point(cls, pt) -> "PolarState":
        x1, x2, y1, y2 = as_point4(pt).tolist()
        return cls(
            r1=math.hypot(x1, x2),
            r2=math.hypot(y1, y2),
            phi1=math.atan2(x2, x1),
            phi2=math.atan2(y2, y1),
            r3=x1 * y1 + x2 * y2,
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.phi1, self.phi2, self.r3])

    def to_point(self) -> np.ndarray:
        return np.array([
            self.r1 * math.cos(self.phi1), self.r1 * math.sin(self.phi1),
            self.r2 * math.cos(self.phi2), self.r2 * math.sin(self.phi2),
        ])


def polar_rhs(state, params: ApproximantParams) -> np.ndarray:
    """Time derivative of (r1, r2, phi1, phi2, r3).

    r1 r1' = -g'_y 2n r3,  r2 r2' = g'_x 2n r3,  r3' = 2n (g'_x r1^2 - g'_y r2^2),
    r1 phi1' = g'_y 2n r2 sin(phi1 - phi2),  r2 phi2' = g'_x 2n r1 sin(phi1 - phi2).
    """
    r1, r2, phi1, phi2, r3 = (float(v) for v in np.asarray(state, dtype=float))
    n = params.n
    cx = 2.0 * n * float(params.dg(n * (r1 * r1 - 1.0)))
    cy = 2.0 * n * float(params.dg(n * (r2 * r2 - 1.0)))
    s = math.sin(phi1 - phi2)
    return np.array([
        -cy * r3 / r1,
        cx * r3 / r2,
        cy * r2 * s / r1,
        cx * r1 * s / r2,
        cx * r1 * r1 - cy * r2 * r2,
    ])


@dataclass
class PolarTrajectory:
    times: np.ndarray
    states: np.ndarray

    def to_points(self) -> np.ndarray:
        r1, r2, phi1, phi2 = self.states[:, 0], self.states[:, 1], self.states[:, 2], self.states[:, 3]
        return np.column_stack([r1 * np.cos(phi1), r1 * np.sin(phi1), r2 * np.cos(phi2), r2 * np.sin(phi2)])

    def det_xy(self) -> np.ndarray:
        """r1 r2 sin(phi2 - phi1), which is x1 y2 - x2 y1."""
        s = self.states
        return s[:, 0] * s[:, 1] * np.sin(s[:, 3] - s[:, 2])


def flow_polar(
    init: PolarState,
    params: ApproximantParams,
    t_end: float,
    tol: Optional[float] = None,
    n_samples: Optional[int] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PolarTrajectory:
    tol = tol or tolerances.ode_rtol
    if min(init.r1, init.r2) < _MIN_RADIUS:
        raise ValidationError("polar coordinates are singular at r1 = 0 or r2 = 0")

    def rhs(t, z):
        return polar_rhs(z, params)

    def too_close(t, z):
        return min(z[0], z[1]) - _MIN_RADIUS

    too_close.terminal = True
    t_eval = np.linspace(0.0, t_end, n_samples) if n_samples else None
    sol = _run(rhs, init.as_array(), t_end, tol, t_eval=t_eval, events=too_close)
    if sol.status == 1:
        raise NumericalError(f"radius fell below {_MIN_RADIUS} at t={sol.t_events[0][0]:.6g} (polar singularity)")
    return PolarTrajectory(times=sol.t, states=sol.y.T)


# ── crossings of the corner region ───────────────────────────────────────────

@dataclass
class Transit:
    """One crossing of T_n: both |x| and |y| above 1."""

    entry: np.ndarray
    exit: np.ndarray
    duration: float
    half_time: Optional[float]
    delta_phi: float
    action: float
    solution: object = field(repr=False, default=None)

    @property
    def delta_phi2(self) -> float:
        return _wrap(math.atan2(self.exit[3], self.exit[2]) - math.atan2(self.entry[3], self.entry[2]))


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def entry_state(theta0: float, params: ApproximantParams) -> np.ndarray:
    """x = e^{i(pi + 2 theta0)} on the unit circle, y = sqrt(1+1/n) e^{i theta0}."""
    rho = math.sqrt(params.outer_sq)
    return np.array([
        math.cos(math.pi + 2 * theta0), math.sin(math.pi + 2 * theta0),
        rho * math.cos(theta0), rho * math.sin(theta0),
    ])


def transit(
    entry,
    params: ApproximantParams,
    leaving: str = "y",
    tol: Optional[float] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Transit:
    """Integrate from `entry` until the `leaving` component drops back to the unit circle."""
    if leaving not in ("x", "y"):
        raise ValidationError("leaving must be 'x' or 'y'")
    z0 = as_point4(entry)
    tol = tol or tolerances.ode_rtol
    idx = slice(2, 4) if leaving == "y" else slice(0, 2)
    n, p = params.n, params.p

    def leave(t, z):
        return float(np.sum(z[idx] ** 2)) - 1.0

    leave.terminal = True
    leave.direction = -1

    def r3_turn(t, z):
        sx = n * (z[0] ** 2 + z[1] ** 2 - 1.0)
        sy = n * (z[2] ** 2 + z[3] ** 2 - 1.0)
        gx = p * sx ** (p - 1) if sx > 0 else 0.0
        gy = p * sy ** (p - 1) if sy > 0 else 0.0
        return gx * (z[0] ** 2 + z[1] ** 2) - gy * (z[2] ** 2 + z[3] ** 2)

    sol = _run(
        _cartesian_field(params), np.append(z0, 0.0), tolerances.transit_time_cap, tol,
        events=[leave, r3_turn], dense_output=True, max_step=_max_step(params),
    )
    if sol.status != 1 or not len(sol.t_events[0]):
        raise NumericalError(
            f"trajectory did not leave the corner region of {params.label()} "
            f"within t={tolerances.transit_time_cap}"
        )
    exit_state = sol.y_events[0][0]
    turns = sol.t_events[1]
    return Transit(
        entry=z0,
        exit=exit_state[:4],
        duration=float(sol.t_events[0][0]),
        half_time=float(turns[0]) if len(turns) else None,
        delta_phi=_wrap(math.atan2(exit_state[1], exit_state[0]) - math.atan2(z0[1], z0[0])),
        action=float(exit_state[4]),
        solution=sol.sol,
    )


def _check_theta0(theta0: float) -> None:
    if not 0.0 < theta0 < math.pi / 2:
        raise ValidationError(f"theta0 must lie in (0, pi/2), got {theta0}")


def delta_phi_ode(
    theta0: float,
    params: ApproximantParams,
    tol: Optional[float] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Transit:
    """Angular defect measured by integrating through T_n; the crossing record holds 2T too."""
    _check_theta0(theta0)
    return transit(entry_state(theta0, params), params, leaving="y", tol=tol, tolerances=tolerances)


def _defect_integral(theta0: float, params: ApproximantParams, nodes: int) -> float:
    """Gauss-Legendre value of the defect after u = 1 + (1 - w^p)/n.

    The substitution flattens the cusp of g^-1(1 - g(n(u-1))) at u = 1 + 1/n.
    """
    n, p = params.n, params.p
    rho_sq = params.outer_sq
    det = math.sqrt(rho_sq) * math.sin(theta0)
    t, wts = leggauss(nodes)
    w = 0.5 * (t + 1.0)
    wp = w ** p
    s = 1.0 - wp
    u = 1.0 + s / n
    # 1 - g(s) = 1 - (1 - w^p)^p without cancellation near w = 0
    inner = -np.expm1(p * np.log1p(-wp))
    r2_sq = 1.0 + np.maximum(inner, 0.0) ** (1.0 / p) / n
    radicand = u * r2_sq - det * det
    if np.any(radicand <= 0.0):
        raise NumericalError(
            f"defect integrand is not integrable at theta0={theta0} for {params.label()}",
            samples={"min_radicand": float(radicand.min())},
        )
    jac = p * w ** (p - 1) / n
    integrand = jac / (u * np.sqrt(radicand))
    return -0.5 * det * 0.5 * float(np.dot(wts, integrand))


def delta_phi_quad(
    theta0: float,
    params: ApproximantParams,
    nodes: Optional[int] = None,
    adaptive: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Angular defect of one crossing of T_n by quadrature.

    delta_phi = -1/2 int_1^{1+1/n} sqrt(1+1/n) sin(theta0) / (u sqrt(u r2^2(u) - (1+1/n) sin^2 theta0)) du
    with r2^2(u) = 1 + g^-1(1 - g(n(u-1)))/n.  Node counts double until two
    consecutive values agree to `quad_rtol`.
    """
    _check_theta0(theta0)
    size = nodes or tolerances.quad_nodes
    value = _defect_integral(theta0, params, size)
    if not adaptive:
        return value
    while size <= tolerances.quad_max_nodes:
        size *= 2
        refined = _defect_integral(theta0, params, size)
        if abs(refined - value) <= tolerances.quad_rtol * abs(refined) + 1e-300:
            return refined
        value = refined
    raise NumericalError(f"defect quadrature did not converge at theta0={theta0} with {size} nodes")


def _converged_nodes(theta0: float, params: ApproximantParams, tolerances: Tolerances) -> int:
    size = tolerances.quad_nodes
    value = _defect_integral(theta0, params, size)
    while size <= tolerances.quad_max_nodes:
        refined = _defect_integral(theta0, params, 2 * size)
        if abs(refined - value) <= tolerances.quad_rtol * abs(refined) + 1e-300:
            return 2 * size
        size, value = 2 * size, refined
    return size


# ── closed characteristics ───────────────────────────────────────────────────

@dataclass
class ShootingResult:
    k: int
    m: int
    n: int
    p: float
    target: float
    theta_star: float
    delta_phi: float
    action: float
    residual: float
    period: float
    closure_residual: float

    @property
    def bidisc_action(self) -> float:
        return bouncing_value(self.k, self.m)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bidisc_action"] = self.bidisc_action
        return d


@dataclass
class _Loop:
    action: float
    period: float
    closure_residual: float


def _assemble(theta0: float, m: int, params: ApproximantParams, tolerances: Tolerances) -> _Loop:
    """Action of the closed loop made of m congruent chord pairs.

    Pair = x-chord, crossing, y-chord, crossing.  Chords are exact; the action
    1-form is (x.dy - y.dx)/2 on every piece.
    """
    rho = math.sqrt(params.outer_sq)
    speed = 2.0 * params.n * float(params.dg(1.0)) * rho

    # x-chord from (1, 0) to e^{i(pi + 2 theta)} with y = rho e^{i theta}
    x_chord = 2.0 * math.cos(theta0)
    a_xchord = rho * math.cos(theta0)

    first = transit(entry_state(theta0, params), params, leaving="y", tolerances=tolerances)
    x_e, y_e = first.exit[:2], first.exit[2:]
    x_hat = x_e / np.linalg.norm(x_e)
    y_chord = -2.0 * float(np.dot(y_e, x_hat))
    y_after = y_e + y_chord * x_hat
    a_ychord = 0.5 * float(np.dot(x_e, y_after - y_e))

    second = transit(np.concatenate([x_e, y_after]), params, leaving="x", tolerances=tolerances)

    psi = math.atan2(second.exit[1], second.exit[0])
    expected_y = rho * np.array([math.cos(theta0 + psi), math.sin(theta0 + psi)])
    pair_gap = float(np.linalg.norm(second.exit[2:] - expected_y))
    turn = (m * psi) % (2 * math.pi)
    closure = min(turn, 2 * math.pi - turn) + pair_gap

    pair_action = a_xchord + first.action + a_ychord + second.action
    pair_time = (x_chord + y_chord) / speed + first.duration + second.duration
    return _Loop(action=m * pair_action, period=m * pair_time, closure_residual=closure)


def shoot_closed(
    k: int,
    m: int,
    params: ApproximantParams,
    method: str = "quad",
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ShootingResult:
    """Closed characteristic of D_n near the billiard orbit (k, m).

    Bisection on F(theta) = theta + delta_phi(theta) - theta_{k,m}.  The
    theta = 0 branch has det(x, y) = 0, no defect and needs no search.
    """
    target = theta(k, m)
    if method not in ("quad", "ode"):
        raise ValidationError("method must be 'quad' or 'ode'")

    if target == 0.0:
        loop = _assemble(0.0, m, params, tolerances)
        return ShootingResult(
            k, m, params.n, params.p, target, 0.0, 0.0,
            loop.action, 0.0, loop.period, loop.closure_residual,
        )

    if method == "quad":
        size = _converged_nodes(target, params, tolerances)

        def defect(th: float) -> float:
            return delta_phi_quad(th, params, nodes=size, adaptive=False, tolerances=tolerances)
    else:
        def defect(th: float) -> float:
            return delta_phi_ode(th, params, tolerances=tolerances).delta_phi

    def F(th: float) -> float:
        return th + defect(th) - target

    top = math.pi / 2 - 1e-9
    width = 2.0 * abs(defect(target)) + 1e-9
    seen: dict[float, float] = {}
    for _ in range(40):
        lo, hi = max(target - width, 1e-12), min(target + width, top)
        f_lo, f_hi = F(lo), F(hi)
        seen[lo], seen[hi] = f_lo, f_hi
        if f_lo <= 0.0 <= f_hi:
            break
        if lo <= 1e-12 and hi >= top:
            raise NumericalError(f"no sign change of theta + delta_phi - target for ({k}, {m})", samples=seen)
        width *= 2.0
    else:
        raise NumericalError(f"no sign change of theta + delta_phi - target for ({k}, {m})", samples=seen)

    log.debug("shooting (%d, %d) on %s in [%.12g, %.12g]", k, m, params.label(), lo, hi)
    theta_star = bisect(F, lo, hi, xtol=tolerances.shoot_xtol, maxiter=200)
    residual = abs(F(theta_star))
    if residual > tolerances.shoot_residual:
        raise NumericalError(f"shooting residual {residual:.3e} above {tolerances.shoot_residual:.1e}")
    loop = _assemble(theta_star, m, params, tolerances)
    return ShootingResult(
        k, m, params.n, params.p, target, theta_star, defect(theta_star),
        loop.action, residual, loop.period, loop.closure_residual,
    )


# ── convergence of spectra ───────────────────────────────────────────────────

def hausdorff(a: Sequence[float], b: Sequence[float]) -> float:
    """Hausdorff distance of two finite sets of reals; 0 for two empty sets."""
    if not len(a) and not len(b):
        return 0.0
    if not len(a) or not len(b):
        return math.inf
    A, B = np.asarray(a, dtype=float)[:, None], np.asarray(b, dtype=float)[None, :]
    d = np.abs(A - B)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass
class ApproxSpectrumReport:
    n: int
    p: float
    M: float
    eps: float
    actions: dict[tuple[int, int], float] = field(default_factory=dict)
    approximant: list[float] = field(default_factory=list)
    reference: list[float] = field(default_factory=list)
    distance: float = 0.0
    failures: dict[tuple[int, int], str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "M": self.M,
            "eps": self.eps,
            "actions": [{"k": k, "m": m, "action": a} for (k, m), a in sorted(self.actions.items())],
            "approximant": self.approximant,
            "reference": self.reference,
            "distance": self.distance,
            "failures": [{"k": k, "m": m, "error": e} for (k, m), e in sorted(self.failures.items())],
        }


def approx_spectrum(
    params: ApproximantParams,
    M: float,
    eps: float,
    orbit_list: Iterable[tuple[int, int]],
    method: str = "quad",
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ApproxSpectrumReport:
    """Shoot every (k, m), filter both action sets by the 2*pi*Z bands, compare."""
    report = ApproxSpectrumReport(params.n, params.p, M, eps)
    pairs = list(orbit_list)
    reference = []
    for k, m in pairs:
        value = bouncing_value(k, m)
        if value > M or in_gliding_band(value, eps):
            raise ValidationError(f"orbit ({k}, {m}) has action {value:.6g} outside the truncated range")
        reference.append(value)

    for k, m in pairs:
        try:
            report.actions[(k, m)] = shoot_closed(k, m, params, method, tolerances).action
        except NumericalError as exc:
            log.warning("shooting (%d, %d) on %s failed: %s", k, m, params.label(), exc)
            report.failures[(k, m)] = str(exc)

    report.approximant = sigma_truncated(report.actions.values(), M, eps)
    report.reference = sigma_truncated(reference, M, eps)
    report.distance = hausdorff(report.approximant, report.reference)
    return report
