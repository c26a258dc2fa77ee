"""Verification suite for one (coefficients, level) configuration.

Runs the invariants end to end: conservation along the integrated orbit,
analytic-vs-finite-difference gradient, consistency of the two curvature
forms, the curvature-relation residual, oracle-vs-continuation distance,
the constant-k1 test and mesh unit-norm / lift monotonicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contour import contour_oracle, hausdorff_distance
from .errors import StallAtCriticalPoint
from .geometry import build_mesh, isoparametric_test, rotation_angle
from .orbit import choose_default_start, integrate_profile, trace_level_curve
from .phase import (
    Coefficients,
    LevelKind,
    PhasePoint,
    classify_level,
    critical_data,
    potential_gradient,
    weingarten_potential,
)

__all__ = ["CheckResult", "run_verification"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: float
    passed: bool
    note: str = ""


def _gradient_check(co, n_points=200, seed=20240811):
    rng = np.random.default_rng(seed)
    step = 1e-6
    worst = 0.0
    count = 0
    scale = co.a + abs(co.b) + co.c
    while count < n_points:
        u = rng.uniform(0.0, 1.0)
        v = rng.uniform(-1.0, 1.0)
        if 1.0 - u * u - v * v <= 1e-3:
            continue
        p = PhasePoint(u, v)
        fu, fv = potential_gradient(co, p)
        if math.hypot(fu, fv) < 1e-3 * scale:
            continue
        fd_u = (weingarten_potential(co, PhasePoint(u + step, v))
                - weingarten_potential(co, PhasePoint(u - step, v))) / (2 * step)
        fd_v = (weingarten_potential(co, PhasePoint(u, v + step))
                - weingarten_potential(co, PhasePoint(u, v - step))) / (2 * step)
        rel = math.hypot(fu - fd_u, fv - fd_v) / math.hypot(fd_u, fd_v)
        worst = max(worst, rel)
        count += 1
    return worst


def _trim_near_rim(polys, margin):
    out = []
    for p in polys:
        keep = np.hypot(p[:, 0], p[:, 1]) < 1.0 - margin
        runs = np.split(np.arange(len(p)), np.nonzero(np.diff(keep))[0] + 1)
        for run in runs:
            if keep[run[0]] and len(run) > 1:
                out.append(p[run])
    return out


def run_verification(co: Coefficients, alpha: float, grid_n: int = 512,
                     n_t: int = 32) -> tuple[list[CheckResult], dict]:
    """Run all checks; returns (results, summary metadata)."""
    results: list[CheckResult] = []
    cls = classify_level(co, alpha)
    cd = critical_data(co)

    rel = _gradient_check(co)
    results.append(CheckResult("gradient_finite_difference", rel, 1e-6,
                               rel < 1e-6))

    start, start_note = choose_default_start(co, alpha)
    orbit = integrate_profile(co, alpha, start)

    bound = 1e-8 * (1.0 + abs(alpha))
    results.append(CheckResult("level_conservation", orbit.f_drift_max, bound,
                               orbit.f_drift_max <= bound,
                               f"start: {start_note}"))

    # two forms of the curvature product along the orbit
    x, v, xdd = orbit.x, orbit.xdot, orbit.xddot
    w = np.sqrt(np.maximum(1.0 - x * x - v * v, 0.0))
    ok = (x > 1e-6) & (w > 1e-6) & np.isfinite(xdd)
    xs, ws, xdds = x[ok], w[ok], xdd[ok]
    k2 = (xdds + xs) / ws if len(xs) else np.empty(0)
    keep = np.abs(k2) < 1e6
    if keep.any():
        k1 = -ws[keep] / xs[keep]
        prod = k1 * k2[keep]
        direct = -(xdds[keep] + xs[keep]) / xs[keep]
        relc = float(np.max(np.abs(prod - direct) / np.maximum(np.abs(direct), 1e-12)))
        resid = float(np.max(np.abs(co.a * 0.5 * (k1 + k2[keep]) + co.b * prod - co.c)))
    else:
        relc, resid = 0.0, 0.0
    results.append(CheckResult("curvature_forms_consistency", relc, 1e-8,
                               relc < 1e-8))
    rbound = 1e-6 * (1.0 + co.c)
    results.append(CheckResult("weingarten_residual", resid, rbound,
                               resid <= rbound))

    # oracle vs continuation
    cs = contour_oracle(co, alpha, grid_n)
    if orbit.equilibrium:
        p0 = cd.active_point
        worst = 0.0
        for poly in cs.polylines:
            d = np.hypot(poly[:, 0] - p0.u, poly[:, 1] - p0.v)
            worst = max(worst, float(d.max()))
        results.append(CheckResult("oracle_degenerate_level", worst,
                                   2 * cs.cell_size, worst <= 2 * cs.cell_size,
                                   "contour confined to the critical point"))
    else:
        try:
            trace = trace_level_curve(co, alpha, start)
            closed = bool(np.allclose(trace[0], trace[-1]))
            if closed and cls.kind in (LevelKind.COMPLETE_CLOSED_ORBIT,
                                       LevelKind.CLIFFORD_TORUS):
                d = hausdorff_distance(trace, cs)
                hb = 2 * cs.cell_size
                note = "closed curve, symmetric Hausdorff"
            else:
                margin = 4 * cs.cell_size
                tt = _trim_near_rim([trace], margin)
                ct = _trim_near_rim(cs.polylines, margin)
                if tt and ct:
                    d = hausdorff_distance(tt, ct)
                else:
                    d = 0.0
                hb = 4 * cs.cell_size
                note = "open curve, rim-trimmed comparison"
            results.append(CheckResult("oracle_trace_distance", d, hb,
                                       d <= hb, note))
        except StallAtCriticalPoint:
            results.append(CheckResult("oracle_trace_distance", 0.0, 0.0,
                                       True, "degenerate level, trace skipped"))

    # constant-k1 test with the decided expectation where one exists
    iso = isoparametric_test(co, orbit, min_samples=20)
    expectation = None
    if orbit.equilibrium:
        expectation = True
    elif (co.c == 0.0 and cls.kind is LevelKind.COMPLETE_CLOSED_ORBIT
          and abs(alpha - 0.5 * co.b) > 1e-6 and not cls.singular_locus_hits):
        expectation = False
    iso_ok = iso.is_isoparametric == expectation if expectation is not None else True
    results.append(CheckResult(
        "isoparametric_test", iso.k1_max - iso.k1_min,
        1e-6 * (1.0 + abs(iso.k1_max)), iso_ok,
        f"is_isoparametric={iso.is_isoparametric}"
        + ("" if expectation is None else f", expected {expectation}")))

    # mesh validity and lift monotonicity
    if not orbit.equilibrium:
        rotation_angle(orbit)
    mesh = build_mesh(orbit, n_t=n_t)
    norms = np.linalg.norm(mesh.vertices, axis=1)
    ndev = float(np.max(np.abs(norms - 1.0)))
    results.append(CheckResult("mesh_unit_norm", ndev, 1e-9, ndev <= 1e-9))
    if orbit.theta is not None and len(orbit.theta) > 1:
        dmin = float(np.min(np.diff(orbit.theta)))
    else:
        dmin = 0.0
    results.append(CheckResult("lift_angle_monotone", dmin, 0.0,
                               dmin >= -1e-12, "minimum theta increment"))

    summary = {
        "kind": cls.kind.value,
        "detail": cls.detail,
        "outcome": orbit.outcome.value,
        "outcome_backward": (orbit.outcome_backward.value
                             if orbit.outcome_backward else None),
        "period": orbit.period,
        "equilibrium": orbit.equilibrium,
    }
    return results, summary
