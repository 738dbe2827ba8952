"""Entry point: parses args (with .ehcaprc support), runs one computation, writes the artifact."""
from __future__ import annotations

import argparse
import configparser
import math
import re
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import capacities, dynamics, spectrum, variational
from .config import FORMATS, RunConfig, Tolerances
from .errors import NumericalError, ValidationError
from .export import DEFAULT_TTL_MINUTES, load_cache, save_cache, write_artifact
from .geometry import ApproximantParams
from .log import console, setup_logging, status
from .suggest import hint

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_INTERRUPT = 0, 2, 3, 130


# ── .ehcaprc handler ─────────────────────────────────────────────────────────

def _project_root() -> Optional[Path]:
    cwd = Path.cwd()
    for parent in [cwd, *cwd.parents]:
        if (parent / "pyproject.toml").exists() or (parent / ".git").exists():
            return parent
    return None


def _load_ehcaprc() -> dict[str, str]:
    cfg = configparser.ConfigParser()
    candidates: list[Path] = []

    home_rc = Path.home() / ".ehcaprc"
    if home_rc.exists():
        candidates.append(home_rc)

    root = _project_root()
    if root and (root / ".ehcaprc").exists() and root / ".ehcaprc" != home_rc:
        candidates.append(root / ".ehcaprc")

    try:
        cfg.read(candidates)
    except configparser.Error as exc:
        raise ValidationError(f"unreadable .ehcaprc: {exc}") from exc
    return dict(cfg["defaults"]) if cfg.has_section("defaults") else {}


# ── argument helpers ─────────────────────────────────────────────────────────

def _rc_number(rc: dict[str, str], key: str, cast: Callable[[str], Any], default: Any) -> Any:
    if key not in rc:
        return default
    try:
        return cast(rc[key])
    except ValueError as exc:
        raise ValidationError(f"bad value for {key!r} in .ehcaprc: {rc[key]!r}") from exc


def _pairs(text: str) -> list[tuple[int, int]]:
    """'0,2;1,3' -> [(0, 2), (1, 3)]."""
    out = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            k, m = (int(v) for v in chunk.split(","))
        except ValueError as exc:
            raise ValidationError(f"orbit {chunk!r} is not of the form k,m") from exc
        out.append((k, m))
    return out


def _modes(text: str) -> dict[int, tuple[complex, complex]]:
    """'1:1,0;2:0.2,0.1j' -> {1: (1, 0), 2: (0.2, 0.1j)}."""
    out = {}
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        try:
            k, _, vec = chunk.partition(":")
            a, b = (complex(v.replace(" ", "")) for v in vec.split(","))
            out[int(k)] = (a, b)
        except ValueError as exc:
            raise ValidationError(f"mode {chunk!r} is not of the form k:a,b") from exc
    if not out:
        raise ValidationError("no Fourier modes given")
    return out


def _point_rows(path) -> list[dict]:
    return [
        {"t": t, "x1": p[0], "x2": p[1], "y1": p[2], "y2": p[3]}
        for t, p in path.samples()
    ]


# ── commands ─────────────────────────────────────────────────────────────────
# Each handler returns (result for JSON, rows for CSV or None).

Handler = Callable[[RunConfig], tuple]


def _cmd_spectrum(cfg: RunConfig):
    p = cfg.params
    table = spectrum.enumerate_spectrum(p["max"], not p["no_gliding"], p["n_cap"], cfg.tolerances)
    rows = [e.to_dict() for e in table.elements]
    return {"bound": table.bound, "n_cap": table.n_cap, "truncated_windings": table.truncated_windings,
            "elements": rows}, rows


def _cmd_orbit(cfg: RunConfig):
    p = cfg.params
    orbit = spectrum.billiard_orbit(p["k"], p["n"], cfg.tolerances)
    path = spectrum.lift_to_characteristic(orbit, cfg.tolerances)
    return {
        "k": p["k"],
        "n": p["n"],
        "theta": orbit.theta,
        "vertices": list(orbit.vertices),
        "chord_length": orbit.chord_length,
        "total_length": orbit.total_length,
        "action": path.action,
        "winding": spectrum.winding(p["k"], p["n"]),
    }, _point_rows(path)


def _params(cfg: RunConfig) -> ApproximantParams:
    return ApproximantParams(cfg.params["n"], cfg.params["p"])


def _cmd_flow(cfg: RunConfig):
    p = cfg.params
    params = _params(cfg)
    start = dynamics.entry_state(p["theta0"], params)
    path = dynamics.flow_cartesian(start, params, p["t_end"], n_samples=p["samples"], tolerances=cfg.tolerances)
    rows = dynamics.trajectory_rows(path, params)
    det = path.det_xy()
    energy = np.array([r["energy"] for r in rows])
    return {
        "approximant": params.label(),
        "t_end": path.period,
        "action": path.action,
        "closure_residual": path.closure_residual,
        "det_drift": float(np.max(np.abs(det - det[0]))),
        "energy_drift": float(np.max(np.abs(energy))),
    }, rows


def _cmd_deltaphi(cfg: RunConfig):
    p = cfg.params
    params = _params(cfg)
    result: dict[str, Any] = {"approximant": params.label(), "theta0": p["theta0"]}
    if p["method"] in ("quad", "both"):
        result["quad"] = dynamics.delta_phi_quad(p["theta0"], params, tolerances=cfg.tolerances)
    if p["method"] in ("ode", "both"):
        crossing = dynamics.delta_phi_ode(p["theta0"], params, tolerances=cfg.tolerances)
        result["ode"] = crossing.delta_phi
        result["transit_time"] = crossing.duration
    if "quad" in result and "ode" in result:
        result["difference"] = abs(result["quad"] - result["ode"])
    return result, [result]


def _cmd_shoot(cfg: RunConfig):
    p = cfg.params
    key = {k: p[k] for k in ("k", "m", "n", "p", "method")}
    key["tolerances"] = asdict(cfg.tolerances)
    cached = load_cache("shoot", key, cfg.cache_ttl_seconds)
    if cached:
        status("⚡", f"Using cached shooting result ({cached.age_str})")
        return cached.result, [cached.result]
    status("🎯", f"Shooting ({p['k']}, {p['m']}) on D_{p['n']} …")
    result = dynamics.shoot_closed(p["k"], p["m"], _params(cfg), p["method"], cfg.tolerances).to_dict()
    save_cache("shoot", key, result)
    return result, [result]


def _cmd_approx_spectrum(cfg: RunConfig):
    p = cfg.params
    if p["orbits"]:
        pairs = _pairs(p["orbits"])
    else:
        table = spectrum.enumerate_spectrum(p["max"], include_gliding=False, n_cap=p["m_cap"], tolerances=cfg.tolerances)
        pairs = [(e.k, e.n) for e in spectrum.sigma_truncated(table.elements, p["max"], p["eps"])]
    status("🔍", f"Shooting {len(pairs)} orbits on D_{p['n']} …")
    report = dynamics.approx_spectrum(_params(cfg), p["max"], p["eps"], pairs, p["method"], cfg.tolerances)
    for (k, m), err in report.failures.items():
        status("⚠️ ", f"({k}, {m}) failed: {err}")
    result = report.to_dict()
    return result, result["actions"]


def _cmd_psi(cfg: RunConfig):
    p = cfg.params
    loop = variational.FourierLoop.from_modes(_modes(p["modes"]))
    result = {
        "c": p["c"],
        "action": variational.action_A(loop),
        "gauge_integral": variational.gauge_integral(loop, tolerances=cfg.tolerances),
        "psi": variational.psi_c(loop, p["c"], tolerances=cfg.tolerances),
    }
    if p["approximant"]:
        result["psi_approximant"] = variational.psi_c_approximant(
            loop, p["c"], ApproximantParams(p["approximant"], p["p"]), tolerances=cfg.tolerances,
        )
    return result, loop.to_rows()


def _cmd_scan(cfg: RunConfig):
    p = cfg.params
    status("🎲", f"Sampling {p['samples']} elements of {p['family']} at c={p['c']:g} …")
    report = variational.negativity_scan(
        p["family"], p["c"], p["samples"], p["k_tail"], cfg.seed,
        tail_scale=p["tail_scale"], workers=p["workers"], tolerances=cfg.tolerances,
    )
    result = report.to_dict()
    return result, [{k: v for k, v in result.items() if k != "argmax"}]


def _cmd_certify(cfg: RunConfig):
    p = cfg.params
    c = p["c"]
    if p["case"] == "gamma":
        cert = variational.certify_gamma_profile(c, variational.GammaProfile(p["gamma0"], p["delta_lo"], p["delta_hi"]))
        result = cert.to_dict()
    else:
        result = variational.certificate_coefficients(p["case"], c).to_dict()
    return result, [{k: v for k, v in result.items() if not isinstance(v, list)}]


def _cmd_capacities(cfg: RunConfig):
    p = cfg.params
    domain = capacities.DomainSpec.parse(p["domain"])
    values = capacities.known_capacities(domain, p["kmax"])
    rows = [{"domain": domain.label(), **c.to_dict()} for c in values]
    return {"domain": domain.label(), "capacities": [c.to_dict() for c in values]}, rows


def _cmd_obstruct(cfg: RunConfig):
    p = cfg.params
    report = capacities.obstruction_report(
        capacities.DomainSpec.parse(p["source"]), capacities.DomainSpec.parse(p["target"]), p["kmax"],
    )
    status("🧱" if report.first_violation else "✅", report.summary())
    return report.to_dict(), None


def _cmd_distinguish(cfg: RunConfig):
    p = cfg.params
    if p["threshold"]:
        found = capacities.separation_threshold(p["kmax"])
        return {"kmax": found.kmax, "area": found.area, "R": found.R, "separating_k": found.separating_k}, None
    report = capacities.distinguish_products(p["R"], p["kmax"])
    return report.to_dict(), None


COMMANDS: dict[str, Handler] = {
    "spectrum": _cmd_spectrum,
    "orbit": _cmd_orbit,
    "flow": _cmd_flow,
    "deltaphi": _cmd_deltaphi,
    "shoot": _cmd_shoot,
    "approx-spectrum": _cmd_approx_spectrum,
    "psi": _cmd_psi,
    "scan-negativity": _cmd_scan,
    "certify": _cmd_certify,
    "capacities": _cmd_capacities,
    "obstruct": _cmd_obstruct,
    "distinguish": _cmd_distinguish,
}


def run(config: RunConfig) -> int:
    """Run one command and write its artifact; returns the exit status."""
    handler = COMMANDS.get(config.command)
    if handler is None:
        raise ValidationError(f"unknown command {config.command!r}{hint(config.command, COMMANDS)}")
    result, rows = handler(config)
    written = write_artifact(config, result, rows)
    if written:
        status("💾", f"Wrote {config.label()}")
    return EXIT_OK


# ── parser ───────────────────────────────────────────────────────────────────

class _Parser(argparse.ArgumentParser):
    """argparse with a did-you-mean on unknown subcommands."""

    def error(self, message: str):
        m = re.search(r"invalid choice: '([^']*)'", message)
        if m:
            message += hint(m.group(1), COMMANDS)
        super().error(message)


def build_parser(rc: dict[str, str]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for solver detail")
    common.add_argument(
        "-f", "--format", choices=FORMATS, default=rc.get("format", "json"),
        help="Artifact format (default: %(default)s)",
    )
    common.add_argument("-o", "--output", metavar="PATH", help="Output file; '-' for stdout")
    common.add_argument(
        "--output-dir", metavar="DIR", default=rc.get("output_dir"),
        help="Directory for <command>.<format> when --output is not given",
    )
    common.add_argument("--seed", type=int, default=_rc_number(rc, "seed", int, 0), help="Random seed (default: %(default)s)")
    common.add_argument("--tol", type=float, default=None, help="Per-step ODE tolerance")
    common.add_argument(
        "--cache-ttl", type=int, default=_rc_number(rc, "cache_ttl", int, DEFAULT_TTL_MINUTES), metavar="MINUTES",
        help=f"Cache TTL in minutes (default: {DEFAULT_TTL_MINUTES}). Use 0 to disable.",
    )
    common.add_argument("--no-cache", action="store_true", help="Bypass the result cache")

    approximant = argparse.ArgumentParser(add_help=False)
    approximant.add_argument("--n", type=int, required=True, help="Sharpness index of D_n")
    approximant.add_argument("--p", type=float, default=_rc_number(rc, "p", float, 3.0), help="Profile exponent (default: %(default)s)")

    parser = _Parser(
        prog="ehcap",
        description="Ekeland-Hofer capacities of the Lagrangian bidisc, reproducibly.",
        epilog=(
            "Examples:\n"
            "  ehcap spectrum --max 10 --format csv\n"
            "  ehcap shoot --k 1 --m 3 --n 100\n"
            "  ehcap certify --case I6 --c 5.6568\n"
            "  ehcap capacities --domain bidisc --kmax 3\n"
            "  ehcap obstruct --source complex-bidisc --target bidisc --kmax 3\n\n"
            "Configuration (.ehcaprc):\n"
            "  Put a .ehcaprc in your project root or home directory to set defaults.\n"
            "    [defaults]\n"
            "    format = csv\n"
            "    output_dir = results\n"
            "    seed = 7\n"
            "    p = 3\n"
            "    tol = 1e-10\n"
            "    cache_ttl = 20160\n"
            "  EHCAP_OUTPUT_DIR overrides output_dir."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=argparse.ArgumentParser)
    sub.required = True

    p = sub.add_parser("spectrum", parents=[common], help="Action spectrum up to a bound",
                       description="CSV columns: value, label_type, k, n")
    p.add_argument("--max", type=float, required=True, help="Upper bound M")
    p.add_argument("--no-gliding", action="store_true", help="Omit the 2*n*pi values")
    p.add_argument("--n-cap", type=int, default=None, help="Largest n per winding branch")

    p = sub.add_parser("orbit", parents=[common], help="Billiard orbit and its lift",
                       description="CSV columns: t, x1, x2, y1, y2 (corners of the lifted characteristic)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("flow", parents=[common, approximant], help="Integrate the characteristic flow of D_n",
                       description="CSV columns: t, x1, x2, y1, y2, det, energy")
    p.add_argument("--theta0", type=float, default=math.pi / 4, help="Entry angle of the start point")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=501)

    p = sub.add_parser("deltaphi", parents=[common, approximant], help="Angular defect of one crossing",
                       description="CSV columns: approximant, theta0, quad, ode, transit_time, difference")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--method", choices=("quad", "ode", "both"), default="both")

    p = sub.add_parser("shoot", parents=[common, approximant], help="Closed characteristic near orbit (k, m)",
                       description="CSV columns: k, m, n, p, target, theta_star, delta_phi, action, residual, ...")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=("quad", "ode"), default="quad")

    p = sub.add_parser("approx-spectrum", parents=[common, approximant], help="Truncated spectrum of D_n vs the bidisc",
                       description="CSV columns: k, m, action")
    p.add_argument("--max", type=float, required=True, help="Upper bound M")
    p.add_argument("--eps", type=float, default=0.3, help="Half width of the removed 2k*pi bands")
    p.add_argument("--orbits", default="", help="Orbits as 'k,m;k,m'; default: every bouncing orbit up to M")
    p.add_argument("--m-cap", type=int, default=12, help="Largest m when enumerating orbits")
    p.add_argument("--method", choices=("quad", "ode"), default="quad")

    p = sub.add_parser("psi", parents=[common], help="Evaluate Psi_c on a Fourier loop",
                       description="CSV columns: k, re1, im1, re2, im2 (the loop)")
    p.add_argument("--modes", required=True, help="Coefficients as 'k:a,b;k:a,b' with complex a, b")
    p.add_argument("--c", type=float, default=4 * math.sqrt(2))
    p.add_argument("--approximant", type=int, default=None, metavar="N", help="Also evaluate the D_N functional")
    p.add_argument("--p", type=float, default=_rc_number(rc, "p", float, 3.0))

    p = sub.add_parser("scan-negativity", parents=[common], help="Monte-Carlo sign scan of Psi_c on W2 / W3",
                       description="CSV columns: family, c, samples, K_tail, seed, max_psi, violations, evidence")
    p.add_argument("--family", choices=variational.FAMILIES, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--k-tail", type=int, default=8)
    p.add_argument("--tail-scale", type=float, default=4.0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("certify", parents=[common], help="Certificate coefficients or gamma-profile coverage",
                       description="CSV columns: the scalar fields of the certificate")
    p.add_argument("--case", choices=(*variational.CASES, "gamma"), required=True)
    p.add_argument("--c", type=float, default=4 * math.sqrt(2))
    p.add_argument("--gamma0", type=float, default=0.23)
    p.add_argument("--delta-lo", type=float, default=0.49)
    p.add_argument("--delta-hi", type=float, default=0.6)

    p = sub.add_parser("capacities", parents=[common], help="Capacity table of a domain",
                       description="CSV columns: domain, k, lower, upper, exact, provenance")
    p.add_argument("--domain", required=True, help="e.g. bidisc, ball:4, ellipsoid:4,5.196, bidisc*disc:0.95")
    p.add_argument("--kmax", type=int, default=3)

    p = sub.add_parser("obstruct", parents=[common], help="Capacity obstruction to an embedding")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--kmax", type=int, default=3)

    p = sub.add_parser("distinguish", parents=[common], help="Separate bidisc x disc from complex bidisc x disc")
    p.add_argument("--R", type=float, default=0.95)
    p.add_argument("--kmax", type=int, default=101)
    p.add_argument("--threshold", action="store_true", help="Bisect for the smallest separated radius")

    return parser


_COMMON = {"verbose", "format", "output", "output_dir", "seed", "tol", "cache_ttl", "no_cache", "command"}


def config_from_args(args: argparse.Namespace, rc: dict[str, str]) -> RunConfig:
    tolerances = Tolerances.from_rc(rc).with_ode_tol(args.tol)
    params = {k: v for k, v in vars(args).items() if k not in _COMMON}
    return RunConfig.from_args(
        args.command,
        params,
        tolerances=tolerances,
        seed=args.seed,
        output=args.output,
        output_dir=args.output_dir,
        fmt=args.format,
        cache_ttl_seconds=0 if args.no_cache else args.cache_ttl * 60,
    )


# ── main ─────────────────────────────────────────────────────────────────────

def main(argv: Optional[list[str]] = None) -> None:
    try:
        rc = _load_ehcaprc()
        parser = build_parser(rc)
    except ValidationError as exc:
        console.print(f"❌  {exc}", markup=False)
        sys.exit(EXIT_VALIDATION)
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    try:
        config = config_from_args(args, rc)
        code = run(config)
    except ValidationError as exc:
        console.print(f"❌  {exc}", markup=False)
        code = EXIT_VALIDATION
    except NumericalError as exc:
        console.print(f"❌  Numerical failure: {exc}", markup=False)
        if exc.samples:
            console.print(f"    samples: {exc.samples}", markup=False)
        code = EXIT_NUMERICAL
    except KeyboardInterrupt:
        console.print("\nAborted.", markup=False)
        code = EXIT_INTERRUPT
    sys.exit(code)


if __name__ == "__main__":
    main()
