"""Profile integration on a conserved level set.

The profile height x(s) of the surface obeys the second-order equation whose
unique algebraic solution for the acceleration is

    x'' = w (2 c x + a w) / (a x - 2 b w) - x,    w = sqrt(1 - x^2 - x'^2),

and the pair (x, x') stays on the level curve F = alpha.  This module traces
that curve two ways: as an arclength-parametrized solution with event
detection (closure, axis limit, boundary contact, singular-locus stop), and
as a geometric polyline (pseudo-arclength continuation).  Both delegate the
hot loops to the selected kernel backend.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels_py as K
from ._backend import kernels
from .errors import (
    AxisSingularity,
    BoundarySingularity,
    InvalidStart,
    NumericalDivergence,
    SingularDenominator,
    StallAtCriticalPoint,
    StepBudgetExhausted,
)
from .phase import (
    TOL_W,
    Coefficients,
    PhasePoint,
    critical_data,
    level_tolerance,
    potential_gradient,
    weingarten_potential,
)

__all__ = [
    "IntegrateOptions",
    "TraceOptions",
    "Orbit",
    "OrbitOutcome",
    "OrbitSample",
    "profile_acceleration",
    "integrate_profile",
    "trace_level_curve",
    "level_turning_points",
    "choose_default_start",
    "axis_adjacent_start",
    "sample_profile",
]


def profile_acceleration(co: Coefficients, x: float, xdot: float) -> float:
    """Closed-form x'' at an interior state.

    Raises:
        AxisSingularity: x <= TOL_W.
        SingularDenominator: |a x - 2 b w| below tolerance (the b > 0
            locus where the acceleration is unbounded).
    """
    if x <= TOL_W:
        raise AxisSingularity(f"profile acceleration undefined at x = {x:g}")
    w2 = 1.0 - x * x - xdot * xdot
    w = math.sqrt(max(w2, 0.0))
    den = co.a * x - 2.0 * co.b * w
    if abs(den) <= TOL_W * (co.a + 2.0 * abs(co.b)):
        raise SingularDenominator(
            f"a*x - 2*b*w = {den:g} at (x, xdot) = ({x:g}, {xdot:g})")
    return w * (2.0 * co.c * x + co.a * w) / den - x


class OrbitOutcome(enum.Enum):
    CLOSED_PERIODIC = "ClosedPeriodic"
    AXIS_LIMIT = "AxisLimit"
    BOUNDARY_HIT = "BoundaryHit"
    SINGULAR_LOCUS_HIT = "SingularLocusHit"
    TRUNCATED = "Truncated"


@dataclass(frozen=True)
class OrbitSample:
    s: float
    x: float
    xdot: float
    xddot: float
    theta: float | None = None


@dataclass
class IntegrateOptions:
    rtol: float = 1e-10
    atol: float = 1e-12
    h0: float = 1e-4
    h_min: float = 1e-14
    max_step: float = 0.05
    max_s: float = 100.0
    max_steps: int = 2_000_000
    axis_tol: float = 1e-5
    boundary_tol: float = 1e-9  # threshold on w^2
    sing_tol: float = 1e-5     # relative threshold on g = b - a*u/(2w)
    switch_tol: float = 2e-2   # continuation switchover threshold on g
    closure_tol: float = 1e-6
    start_tol: float = 1e-6
    bidirectional: bool = True


@dataclass
class Orbit:
    """Traced profile solution with its outcome.

    Sample arrays are ordered by increasing s; for bidirectional runs the
    backward leg carries negative s and `outcome_backward` reports its stop.
    theta stays None until filled by the geometry layer.
    """

    coefficients: Coefficients
    alpha: float
    s: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    xddot: np.ndarray
    f_drift: np.ndarray
    outcome: OrbitOutcome
    outcome_backward: OrbitOutcome | None = None
    period: float | None = None
    axis_sign: int | None = None
    event_point: PhasePoint | None = None
    event_point_backward: PhasePoint | None = None
    turning_points: list[PhasePoint] = field(default_factory=list)
    f_drift_max: float = 0.0
    pre_projection_residual_max: float = 0.0
    equilibrium: bool = False
    theta: np.ndarray | None = None
    rotation_number: float | None = None  # set with theta on periodic orbits

    @property
    def n_samples(self) -> int:
        return len(self.s)

    def sample(self, i: int) -> OrbitSample:
        th = float(self.theta[i]) if self.theta is not None else None
        return OrbitSample(float(self.s[i]), float(self.x[i]),
                           float(self.xdot[i]), float(self.xddot[i]), th)


_OUTCOME_BY_CODE = {
    K.OUT_TRUNCATED: OrbitOutcome.TRUNCATED,
    K.OUT_CLOSED: OrbitOutcome.CLOSED_PERIODIC,
    K.OUT_AXIS_LIMIT: OrbitOutcome.AXIS_LIMIT,
    K.OUT_AXIS_CROSS: OrbitOutcome.BOUNDARY_HIT,
    K.OUT_CIRCLE: OrbitOutcome.BOUNDARY_HIT,
    K.OUT_SINGULAR: OrbitOutcome.SINGULAR_LOCUS_HIT,
}


def _strictly_increasing(s, *arrs):
    # keep the latest sample at any s tie (events land there); the sample
    # arrays must be strictly increasing in s
    n = len(s)
    keep = np.ones(n, dtype=bool)
    nxt = math.inf
    for i in range(n - 1, -1, -1):
        if s[i] < nxt:
            nxt = s[i]
        else:
            keep[i] = False
    return (s[keep],) + tuple(a[keep] for a in arrs)


def _run_leg(co, alpha, x0, v0, opts):
    res = kernels.integrate_core(
        co.a, co.b, co.c, alpha, x0, v0,
        opts.rtol, opts.atol, opts.h0, opts.h_min, opts.max_step,
        opts.max_s, opts.max_steps, opts.axis_tol, opts.boundary_tol,
        opts.sing_tol, opts.switch_tol, opts.closure_tol,
        1e-14 * (1.0 + abs(alpha)), 1e-12 * (co.a + abs(co.b) + co.c))
    code = res[5]
    if code == K.OUT_DIVERGED:
        raise NumericalDivergence(
            f"step size underflow at alpha = {alpha:g} away from any event")
    if code == K.OUT_STEP_BUDGET:
        raise NumericalDivergence(
            f"step budget exhausted at alpha = {alpha:g} without an event")
    cleaned = _strictly_increasing(res[0], res[1], res[2], res[3], res[4])
    return cleaned + res[5:]


def integrate_profile(co: Coefficients, alpha: float, start: PhasePoint,
                      opts: IntegrateOptions | None = None) -> Orbit:
    """Integrate the profile system from `start` on the level curve F = alpha.

    The start is projected onto the level set first (InvalidStart beyond
    opts.start_tol).  A start at the interior critical point returns a
    one-sample equilibrium orbit.  When the forward leg does not close, a
    backward leg is integrated as well (mirrored forward run, exploiting the
    evenness of F in v) so both ends of the maximal solution are reported.
    """
    opts = opts or IntegrateOptions()
    x0, v0 = float(start[0]), float(start[1])
    f0 = weingarten_potential(co, PhasePoint(x0, v0))
    if abs(f0 - alpha) > opts.start_tol:
        raise InvalidStart(
            f"start has F = {f0:.12g}, requested level {alpha:.12g}")

    # equilibrium start: the level set is the critical point itself
    try:
        fu, fv = potential_gradient(co, PhasePoint(x0, v0))
        grad_norm = math.hypot(fu, fv)
    except BoundarySingularity:
        grad_norm = math.inf
    if grad_norm < 1e-7 * (co.a + abs(co.b) + co.c):
        acc = 0.0
        return Orbit(co, alpha, np.array([0.0]), np.array([x0]),
                     np.array([v0]), np.array([acc]), np.array([0.0]),
                     OrbitOutcome.CLOSED_PERIODIC, period=0.0,
                     turning_points=[PhasePoint(x0, v0)], equilibrium=True)

    fwd = _run_leg(co, alpha, x0, v0, opts)
    (s_f, x_f, v_f, xdd_f, dr_f, code_f, eu_f, ev_f, es_f, per_f,
     pre_f, cu_f, cs_f) = fwd
    outcome = _OUTCOME_BY_CODE[code_f]

    s_all, x_all, v_all, xdd_all, dr_all = s_f, x_f, v_f, xdd_f, dr_f
    turning = [PhasePoint(float(u), 0.0) for u in cu_f]
    out_back = None
    ev_back = None
    pre_max = float(pre_f)

    if (opts.bidirectional and outcome is not OrbitOutcome.CLOSED_PERIODIC):
        # backward leg == mirrored forward leg from (x0, -v0), F even in v
        bwd = _run_leg(co, alpha, x0, -v0, opts)
        (s_b, x_b, v_b, xdd_b, dr_b, code_b, eu_b, ev_b, es_b, _per_b,
         pre_b, cu_b, cs_b) = bwd
        out_back = _OUTCOME_BY_CODE[code_b]
        if not math.isnan(eu_b):
            ev_back = PhasePoint(float(eu_b), float(-ev_b))
        pre_max = max(pre_max, float(pre_b))
        # drop the duplicated s = 0 sample, mirror, reverse
        s_all = np.concatenate([-s_b[:0:-1], s_f])
        x_all = np.concatenate([x_b[:0:-1], x_f])
        v_all = np.concatenate([-v_b[:0:-1], v_f])
        xdd_all = np.concatenate([xdd_b[:0:-1], xdd_f])
        dr_all = np.concatenate([dr_b[:0:-1], dr_f])
        turning = ([PhasePoint(float(u), 0.0) for u in cu_b[::-1]] + turning)

    orbit = Orbit(co, alpha, s_all, x_all, v_all, xdd_all, dr_all, outcome,
                  outcome_backward=out_back,
                  period=float(per_f) if not math.isnan(per_f) else None,
                  event_point=(PhasePoint(float(eu_f), float(ev_f))
                               if not math.isnan(eu_f) else None),
                  event_point_backward=ev_back,
                  turning_points=turning,
                  f_drift_max=float(dr_all.max()) if len(dr_all) else 0.0,
                  pre_projection_residual_max=pre_max)
    if outcome is OrbitOutcome.AXIS_LIMIT:
        orbit.axis_sign = int(ev_f)
    return orbit


@dataclass
class TraceOptions:
    step: float = 2e-3
    projection_tol: float = 1e-10
    closure_tol: float = 4e-3
    w2_stop: float = 1e-12
    max_steps: int = 200_000
    start_tol: float = 1e-4


def _nudge_inward(co, alpha, u, v):
    # move a boundary-band start into the interior along the level curve,
    # using du/dw = -((a/2)u - b w) / ((a/2)w + c u) at fixed F
    w_in = 1e-5
    for _ in range(40):
        du_dw = -(0.5 * co.a * u) / (0.5 * co.a * w_in + co.c * u) if u > 0 else 0.0
        un = u + du_dw * w_in
        vsq = 1.0 - un * un - w_in * w_in
        if vsq <= 0.0:
            w_in *= 2.0
            continue
        vn = math.copysign(math.sqrt(vsq), v if v != 0.0 else 1.0)
        return un, vn
    return u, v


def trace_level_curve(co: Coefficients, alpha: float, start: PhasePoint,
                      opts: TraceOptions | None = None) -> np.ndarray:
    """Polyline of the level curve F = alpha through `start`, shape (n, 2).

    Closed curves return with the first point repeated at the end.  Open
    curves are traced in both directions and stitched, with each endpoint
    snapped onto the domain boundary it terminates on (axis points satisfy
    b v^2 = 2 alpha, circle points c u^2 = 2 alpha - b).

    Raises:
        InvalidStart, StallAtCriticalPoint, StepBudgetExhausted.
    """
    opts = opts or TraceOptions()
    u0, v0 = float(start[0]), float(start[1])
    if 1.0 - u0 * u0 - v0 * v0 < 1e-9:
        u0, v0 = _nudge_inward(co, alpha, u0, v0)
    if abs(K._fval(co.a, co.b, co.c, u0, v0) - alpha) > opts.start_tol:
        raise InvalidStart(
            f"start has F = {K._fval(co.a, co.b, co.c, u0, v0):.12g}, "
            f"requested level {alpha:.12g}")
    # polish the start onto the level set
    for _ in range(8):
        r = K._fval(co.a, co.b, co.c, u0, v0) - alpha
        if abs(r) <= opts.projection_tol:
            break
        fu, fv, w2 = K._fgrad(co.a, co.b, co.c, u0, v0)
        g2 = fu * fu + fv * fv
        if w2 <= K.TOL_DOMAIN or g2 < 1e-28:
            break
        u0 -= r / g2 * fu
        v0 -= r / g2 * fv
    fu, fv, w2 = K._fgrad(co.a, co.b, co.c, u0, v0)
    stall_tol = 1e-8 * (co.a + abs(co.b) + co.c)
    if w2 <= K.TOL_DOMAIN or math.sqrt(fu * fu + fv * fv) <= stall_tol:
        raise StallAtCriticalPoint(
            f"gradient vanishes at the start ({u0:g}, {v0:g}); "
            "the level set degenerates to a point there")

    def run(direction):
        return kernels.trace_core(co.a, co.b, co.c, alpha, u0, v0,
                                  opts.step, opts.projection_tol,
                                  opts.closure_tol, opts.w2_stop,
                                  opts.max_steps, direction, stall_tol)

    pts_f, code_f, side_f = run(1.0)
    if code_f == K.TRACE_STALL:
        raise StallAtCriticalPoint("trace stalled on a vanishing gradient")
    if code_f == K.TRACE_CLOSED:
        return pts_f
    if code_f == K.TRACE_BUDGET:
        raise StepBudgetExhausted(f"trace exceeded {opts.max_steps} steps")

    pts_b, code_b, side_b = run(-1.0)
    if code_b == K.TRACE_STALL:
        raise StallAtCriticalPoint("trace stalled on a vanishing gradient")
    if code_b == K.TRACE_BUDGET:
        raise StepBudgetExhausted(f"trace exceeded {opts.max_steps} steps")

    def endpoint(side, last):
        u_l, v_l = last
        if side == K.SIDE_AXIS:
            vsq = min(max(2.0 * alpha / co.b, 0.0), 1.0)
            return np.array([0.0, math.copysign(math.sqrt(vsq), v_l)])
        if co.c > 0.0:
            usq = min(max((2.0 * alpha - co.b) / co.c, 0.0), 1.0)
            ue = math.sqrt(usq)
            ve = math.copysign(math.sqrt(max(1.0 - usq, 0.0)), v_l)
            return np.array([ue, ve])
        nrm = math.sqrt(u_l * u_l + v_l * v_l)
        return np.array([u_l / nrm, v_l / nrm])

    parts = [pts_b[::-1]]
    if code_b == K.TRACE_BOUNDARY:
        parts.insert(0, endpoint(side_b, pts_b[-1])[None, :])
    parts.append(pts_f[1:])
    if code_f == K.TRACE_BOUNDARY:
        parts.append(endpoint(side_f, pts_f[-1])[None, :])
    return np.vstack(parts)


def _f_on_axis_v0(co, u):
    w2 = 1.0 - u * u
    if w2 < 0.0:
        w2 = 0.0
    return 0.5 * (co.a * u * math.sqrt(w2) + (co.b + co.c) * u * u)


def level_turning_points(co: Coefficients, alpha: float,
                         scan_n: int = 4096) -> np.ndarray:
    """All u in (0, 1] with F(u, 0) = alpha, by sign-change scan + brentq.

    This is the independent oracle for the integrator's Poincare turning
    points: brute-force bisection against the closed-form section function.
    """
    us = np.linspace(0.0, 1.0, scan_n)
    vals = np.array([_f_on_axis_v0(co, u) - alpha for u in us])
    roots = []
    for i in range(scan_n - 1):
        f0, f1 = vals[i], vals[i + 1]
        if f0 == 0.0:
            roots.append(us[i])
        elif f0 * f1 < 0.0:
            roots.append(brentq(lambda u: _f_on_axis_v0(co, u) - alpha,
                                us[i], us[i + 1], xtol=1e-15, rtol=8.9e-16))
    if vals[-1] == 0.0:
        roots.append(1.0)
    return np.array(sorted(set(roots)))


def axis_adjacent_start(co: Coefficients, alpha: float,
                        eps: float = 1e-4) -> PhasePoint:
    """Start point on C_alpha next to the axis corner (0, 1).

    Solves F(u, 1 - eps) = alpha for the interior u.  Intended for the
    alpha = b/2 levels (b > 0) whose curve ends at (0, +-1).
    """
    v0 = 1.0 - eps
    # keep the bracket end clear of the w^2 clamp band so F still carries
    # the a*u*w term there
    u_hi = math.sqrt(max(1.0 - v0 * v0 - 1e-9, 0.0))

    def g(u):
        return K._fval(co.a, co.b, co.c, u, v0) - alpha

    lo, hi = 0.0, u_hi
    if g(lo) * g(hi) > 0.0:
        raise InvalidStart(
            f"no axis-adjacent point of the level {alpha:g} at v = {v0:g}")
    u = brentq(g, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return PhasePoint(u, v0)


def choose_default_start(co: Coefficients, alpha: float) -> tuple[PhasePoint, str]:
    """Default integration start for a level: the smallest v = 0 crossing,
    the critical point for the top level, the axis-adjacent point for the
    b/2 level (b > 0), or the horizontal-tangent point as a fallback."""
    from .phase import gamma_locus_intersections  # local import, cycle-free

    cd = critical_data(co)
    tol = level_tolerance(co)
    if abs(alpha - cd.alpha0) <= tol:
        return cd.active_point, "equilibrium (interior critical point)"
    if co.b > 0.0 and abs(alpha - 0.5 * co.b) <= tol:
        return axis_adjacent_start(co, alpha), "axis-adjacent start near (0, 1)"
    roots = level_turning_points(co, alpha)
    roots = roots[roots > 1e-12]
    if len(roots):
        return PhasePoint(float(roots[0]), 0.0), "smallest v = 0 crossing"
    pts = gamma_locus_intersections(co, alpha)
    if pts:
        p = max(pts, key=lambda q: q.v)
        return p, "horizontal-tangent point (no v = 0 crossing exists)"
    raise InvalidStart(f"no start point found on the level {alpha:g}")


def sample_profile(orbit: Orbit, s_values: np.ndarray) -> np.ndarray:
    """Cubic Hermite evaluation of x(s) between orbit samples."""
    s, x, v = orbit.s, orbit.x, orbit.xdot
    out = np.empty(len(s_values))
    for k, sv in enumerate(np.asarray(s_values, dtype=float)):
        i = int(np.searchsorted(s, sv)) - 1
        i = min(max(i, 0), len(s) - 2)
        h = s[i + 1] - s[i]
        t = (sv - s[i]) / h
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        out[k] = (h00 * x[i] + h10 * h * v[i]
                  + h01 * x[i + 1] + h11 * h * v[i + 1])
    return out
