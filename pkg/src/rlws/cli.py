"""Command-line interface.

    rlws <classify|portrait|orbit|mesh|verify> --a F --b F --c F
         [--alpha F | --alpha-sweep FROM:TO:N] [--grid-n N] [--n-t N]
         [--out PATH] [--config PATH] [--tol-* ...]

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 numerical failure.  An optional flat key=value config file supplies
defaults; explicit flags win.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_verification
from .errors import NumericalError, PoleOnSurface, ValidationError
from .formats import csv_text, fmt17, json_text, obj_text
from .geometry import build_mesh, principal_curvatures, rotation_angle, stereographic_project
from .orbit import (
    IntegrateOptions,
    OrbitOutcome,
    choose_default_start,
    integrate_profile,
)
from .phase import classify_level, critical_data, validate_normalize
from .portrait import default_levels, render_portrait

_TOL_KEYS = ("tol-level", "tol-delta", "rtol", "atol", "max-s",
             "axis-tol", "closure-tol")


@dataclass
class RunConfig:
    a: float
    b: float
    c: float
    alpha: float | None = None
    alpha_sweep: tuple[float, float, int] | None = None
    grid_n: int = 512
    n_t: int = 64
    out: Path | None = None
    levels: list[float] | None = None
    show_gamma: bool = True
    show_singular: bool = True
    pole: int | None = None
    tol_level: float | None = None
    tol_delta: float | None = None
    rtol: float | None = None
    atol: float | None = None
    max_s: float | None = None
    axis_tol: float | None = None
    closure_tol: float | None = None

    def alphas(self) -> list[float]:
        if self.alpha_sweep is not None:
            lo, hi, n = self.alpha_sweep
            return [float(x) for x in np.linspace(lo, hi, n)]
        return [self.alpha] if self.alpha is not None else []

    def integrate_options(self) -> IntegrateOptions:
        opts = IntegrateOptions()
        if self.rtol is not None:
            opts.rtol = self.rtol
        if self.atol is not None:
            opts.atol = self.atol
        if self.max_s is not None:
            opts.max_s = self.max_s
        if self.axis_tol is not None:
            opts.axis_tol = self.axis_tol
        if self.closure_tol is not None:
            opts.closure_tol = self.closure_tol
        return opts


def _build_parser():
    p = argparse.ArgumentParser(prog="rlws", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rlws {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, desc in (
            ("classify", "closed-form level taxonomy and critical data"),
            ("portrait", "SVG phase portrait + CSV vertex list"),
            ("orbit", "integrate one profile orbit, CSV + JSON summary"),
            ("mesh", "surface mesh, OBJ + JSON sidecar"),
            ("verify", "run the invariant suite, JSON verdict")):
        q = sub.add_parser(name, help=desc)
        q.add_argument("--a", type=float, default=None)
        q.add_argument("--b", type=float, default=None)
        q.add_argument("--c", type=float, default=None)
        q.add_argument("--alpha", type=float, default=None)
        q.add_argument("--alpha-sweep", type=str, default=None,
                       metavar="FROM:TO:N")
        q.add_argument("--grid-n", type=int, default=None)
        q.add_argument("--n-t", type=int, default=None)
        q.add_argument("--out", type=str, default=None)
        q.add_argument("--config", type=str, default=None)
        q.add_argument("--levels", type=str, default=None,
                       help="comma-separated portrait levels")
        q.add_argument("--no-gamma", action="store_true")
        q.add_argument("--no-singular-locus", action="store_true")
        q.add_argument("--pole", type=int, default=None,
                       help="stereographic pole, signed axis 1..4")
        for key in _TOL_KEYS:
            q.add_argument(f"--{key}", type=float, default=None)
    return p


def _load_config_file(path: str) -> dict:
    cfg = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("_", "-")] = val
    return cfg


def _merge(args) -> RunConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}

    def pick(flag, cast, default=None):
        v = getattr(args, flag.replace("-", "_"), None)
        if v is not None:
            return v
        if flag in file_cfg:
            return cast(file_cfg[flag])
        return default

    a = pick("a", float)
    b = pick("b", float)
    c = pick("c", float)
    if a is None or b is None or c is None:
        raise ValidationError("--a, --b and --c are required")

    sweep = None
    sweep_raw = pick("alpha-sweep", str)
    if sweep_raw is not None:
        parts = str(sweep_raw).split(":")
        if len(parts) != 3:
            raise ValidationError("--alpha-sweep expects FROM:TO:N")
        sweep = (float(parts[0]), float(parts[1]), int(parts[2]))
        if sweep[2] < 1:
            raise ValidationError("sweep count must be >= 1")

    levels = None
    levels_raw = pick("levels", str)
    if levels_raw is not None:
        levels = [float(t) for t in str(levels_raw).split(",") if t.strip()]

    grid_n = pick("grid-n", int, 512)
    if not 16 <= grid_n <= 4096:
        raise ValidationError("--grid-n must be in [16, 4096]")

    return RunConfig(
        a=a, b=b, c=c,
        alpha=pick("alpha", float), alpha_sweep=sweep,
        grid_n=grid_n, n_t=pick("n-t", int, 64),
        out=Path(args.out) if args.out else None,
        levels=levels,
        show_gamma=not args.no_gamma,
        show_singular=not args.no_singular_locus,
        pole=pick("pole", int),
        tol_level=pick("tol-level", float),
        tol_delta=pick("tol-delta", float),
        rtol=pick("rtol", float), atol=pick("atol", float),
        max_s=pick("max-s", float),
        axis_tol=pick("axis-tol", float),
        closure_tol=pick("closure-tol", float),
    )


def _coeffs(cfg: RunConfig):
    return validate_normalize(cfg.a, cfg.b, cfg.c, tol_delta=cfg.tol_delta)


def _report_head(co):
    return {
        "tool": "rlws",
        "version": __version__,
        "coefficients": {"a": co.a, "b": co.b, "c": co.c,
                         "delta": co.delta, "negated": co.negated},
    }


def _pt(p):
    return [p.u, p.v] if hasattr(p, "u") else [float(p[0]), float(p[1])]


def _emit(text: str, path: Path | None):
    if path is not None:
        path.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_classify(cfg: RunConfig) -> int:
    co = _coeffs(cfg)
    cd = critical_data(co)
    report = _report_head(co)
    report["critical"] = {
        "u_plus": cd.u_plus, "u_minus": cd.u_minus, "alpha0": cd.alpha0,
        "tau": cd.tau, "alpha_min": cd.alpha_min, "alpha_max": cd.alpha_max,
        "active_critical": cd.active_critical,
    }

    def one(alpha):
        cls = classify_level(co, alpha, tol_level=cfg.tol_level)
        return {
            "alpha": alpha,
            "kind": cls.kind.value,
            "detail": cls.detail,
            "special_sets": {
                "axis": [_pt(p) for p in cls.special_sets.axis],
                "circle": [_pt(p) for p in cls.special_sets.circle],
                "circle_is_full": cls.special_sets.circle_is_full,
                "gamma": [_pt(p) for p in cls.special_sets.gamma],
            },
            "singular_locus_hits": [_pt(p) for p in cls.singular_locus_hits],
        }

    alphas = cfg.alphas()
    if len(alphas) > 1:
        with ThreadPoolExecutor(max_workers=min(8, len(alphas))) as ex:
            report["levels"] = list(ex.map(one, alphas))
    else:
        report["levels"] = [one(a) for a in alphas]
    _emit(json_text(report), cfg.out)
    return 0


def cmd_portrait(cfg: RunConfig) -> int:
    co = _coeffs(cfg)
    levels = cfg.levels if cfg.levels is not None else default_levels(co)
    svg, csv_rows = render_portrait(co, levels, grid_n=cfg.grid_n,
                                    show_gamma=cfg.show_gamma,
                                    show_singular=cfg.show_singular)
    out = cfg.out if cfg.out is not None else Path("rlws_portrait.svg")
    out.write_text(svg)
    csv_path = out.with_suffix(".csv")
    csv_path.write_text(csv_text(("level", "u", "v"), csv_rows))
    report = _report_head(co)
    report.update({"svg": str(out), "csv": str(csv_path),
                   "levels": levels, "grid_n": cfg.grid_n})
    sys.stdout.write(json_text(report))
    return 0


def _orbit_csv_rows(co, orbit):
    w = np.sqrt(np.maximum(1.0 - orbit.x ** 2 - orbit.xdot ** 2, 0.0))
    rows = []
    for i in range(orbit.n_samples):
        x, v, xdd = orbit.x[i], orbit.xdot[i], orbit.xddot[i]
        th = orbit.theta[i] if orbit.theta is not None else float("nan")
        if x > 1e-9 and w[i] > 1e-9:
            kp = principal_curvatures(co, float(x), float(v), float(xdd))
            k1, k2 = kp.k1, kp.k2
            resid = (co.a * kp.H + co.b * kp.K - co.c
                     if not kp.k2_unbounded else float("nan"))
        else:
            k1 = k2 = resid = float("nan")
        rows.append(tuple(fmt17(float(t)) for t in
                          (orbit.s[i], x, v, xdd, th, k1, k2, resid)))
    return rows


def _require_alpha_in_range(co, alpha):
    cd = critical_data(co)
    tol = 1e-9 * (1.0 + abs(cd.alpha0))
    if not (cd.alpha_min - tol <= alpha <= cd.alpha0 + tol):
        raise ValidationError(
            f"alpha = {alpha:g} outside the attainable range "
            f"[{cd.alpha_min:g}, {cd.alpha0:g}]")


def cmd_orbit(cfg: RunConfig) -> int:
    co = _coeffs(cfg)
    if cfg.alpha is None:
        raise ValidationError("orbit requires a single --alpha")
    _require_alpha_in_range(co, cfg.alpha)
    start, start_note = choose_default_start(co, cfg.alpha)
    orbit = integrate_profile(co, cfg.alpha, start, cfg.integrate_options())
    rotation_angle(orbit)
    rows = _orbit_csv_rows(co, orbit)
    out = cfg.out if cfg.out is not None else Path("rlws_orbit.csv")
    out.write_text(csv_text(
        ("s", "x", "xdot", "xddot", "theta", "k1", "k2", "residual"), rows))

    k1s = [float(r[5]) for r in rows if r[5] != "nan"]
    dtheta = float(orbit.theta[-1] - orbit.theta[0])
    report = _report_head(co)
    report.update({
        "alpha": cfg.alpha,
        "start": _pt(start),
        "start_rule": start_note,
        "outcome": orbit.outcome.value,
        "outcome_backward": (orbit.outcome_backward.value
                             if orbit.outcome_backward else None),
        "equilibrium": orbit.equilibrium,
        "period": orbit.period,
        "f_drift_max": orbit.f_drift_max,
        "k1_range": [min(k1s), max(k1s)] if k1s else None,
        "delta_theta": dtheta,
        "rotation_number": orbit.rotation_number,
        "event_point": _pt(orbit.event_point) if orbit.event_point else None,
        "event_point_backward": (_pt(orbit.event_point_backward)
                                 if orbit.event_point_backward else None),
        "turning_points": [_pt(p) for p in orbit.turning_points],
        "csv": str(out),
    })
    if orbit.outcome is OrbitOutcome.SINGULAR_LOCUS_HIT:
        report["warning"] = "k2 unbounded at the singular-locus stop; see report"
    sys.stdout.write(json_text(report))
    return 0


def cmd_mesh(cfg: RunConfig) -> int:
    co = _coeffs(cfg)
    if cfg.alpha is None:
        raise ValidationError("mesh requires a single --alpha")
    _require_alpha_in_range(co, cfg.alpha)
    start, _ = choose_default_start(co, cfg.alpha)
    orbit = integrate_profile(co, cfg.alpha, start, cfg.integrate_options())
    mesh = build_mesh(orbit, n_t=cfg.n_t)
    if cfg.pole is not None:
        candidates = [cfg.pole]
    else:
        candidates = [None]
    candidates += [p for p in (1, -1, 2, -2, 3, -3, 4, -4)
                   if p not in candidates]
    proj = None
    for pole in candidates:
        try:
            proj = stereographic_project(mesh, pole)
            break
        except PoleOnSurface:
            continue
    if proj is None:
        raise PoleOnSurface("all eight coordinate poles touch the surface")

    out = cfg.out if cfg.out is not None else Path("rlws_mesh.obj")
    comments = (
        f"rlws {__version__}",
        f"a={fmt17(co.a)} b={fmt17(co.b)} c={fmt17(co.c)} "
        f"alpha={fmt17(cfg.alpha)}",
        f"pole={proj.pole:+d} rows={mesh.n_rows} n_t={mesh.n_t} "
        f"closed_s={mesh.meta.closed_s}",
    )
    out.write_text(obj_text(proj.vertices, proj.faces, comments))
    side = out.with_suffix(".json")
    report = _report_head(co)
    report.update({
        "alpha": cfg.alpha,
        "outcome": orbit.outcome.value,
        "rows": mesh.n_rows,
        "n_t": mesh.n_t,
        "closed_s": mesh.meta.closed_s,
        "rotation_number": mesh.meta.rotation_number,
        "pole": proj.pole,
        "obj": str(out),
        "vertices_r4": [[float(x) for x in vtx] for vtx in mesh.vertices],
    })
    side.write_text(json_text(report))
    report_small = {k: v for k, v in report.items() if k != "vertices_r4"}
    report_small["sidecar"] = str(side)
    sys.stdout.write(json_text(report_small))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    co = _coeffs(cfg)
    if cfg.alpha is None:
        raise ValidationError("verify requires a single --alpha")
    _require_alpha_in_range(co, cfg.alpha)
    results, summary = run_verification(co, cfg.alpha, grid_n=cfg.grid_n,
                                        n_t=min(cfg.n_t, 64))
    report = _report_head(co)
    report["alpha"] = cfg.alpha
    report["summary"] = summary
    report["checks"] = [
        {"name": r.name, "measured": r.measured, "bound": r.bound,
         "pass": r.passed, "note": r.note} for r in results
    ]
    all_pass = all(r.passed for r in results)
    report["all_pass"] = all_pass
    _emit(json_text(report), cfg.out)
    return 0 if all_pass else 1


_COMMANDS = {
    "classify": cmd_classify,
    "portrait": cmd_portrait,
    "orbit": cmd_orbit,
    "mesh": cmd_mesh,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge(args)
        return _COMMANDS[args.command](cfg)
    except ValidationError as exc:
        print(f"rlws: invalid input: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"rlws: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
