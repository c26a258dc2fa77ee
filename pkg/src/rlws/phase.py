"""Closed-form phase-plane layer for the conserved quantity

    F(u, v) = (a/2) u w + (b/2)(u^2 + v^2) + (c/2) u^2,   w = sqrt(1 - u^2 - v^2)

on the half-disk D = {u >= 0, u^2 + v^2 <= 1}.  A rotational surface of the
3-sphere satisfying a*H + b*K = c has its profile height x(s) and derivative
confined to a single level set C_alpha = {F = alpha}, so everything about
existence, completeness and the shape of solutions is decided here in closed
form: critical data, the attainable level range, intersections of C_alpha
with the axis {u = 0}, the unit circle, the horizontal-tangent locus and the
acceleration-singular locus, and the resulting level taxonomy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .errors import (
    BoundarySingularity,
    DomainViolation,
    RejectNegativeA,
    RejectZeroA,
    RejectZeroB,
    RejectZeroDiscriminant,
)

# Width of the band around the unit circle inside which w^2 is snapped to 0.
# Points in the band evaluate F at its boundary limit value, which keeps
# circle intersections exact to rounding.
TOL_DOMAIN = 1e-12
# Guard scale for 1/x and 1/w quotients in the integrator and geometry layer.
TOL_W = 1e-9


class PhasePoint(NamedTuple):
    u: float
    v: float


@dataclass(frozen=True)
class Coefficients:
    """Validated triple of the linear curvature relation a*H + b*K = c.

    delta = a^2 + 4*b*c distinguishes the elliptic (delta > 0) and
    hyperbolic (delta < 0) types; delta == 0 is rejected.  `negated`
    records whether the raw input was flipped to make c >= 0.
    """

    a: float
    b: float
    c: float
    delta: float
    negated: bool = False


def validate_normalize(a_raw: float, b_raw: float, c_raw: float,
                       tol_delta: float | None = None) -> Coefficients:
    """Canonicalize a raw (a, b, c) triple.

    The relation a*H + b*K = c is invariant under a simultaneous sign flip,
    so c < 0 inputs are negated wholesale.  After that the analyzed family
    requires a > 0, b != 0 and a nonzero discriminant.

    Raises:
        RejectZeroA, RejectZeroB, RejectNegativeA, RejectZeroDiscriminant
    """
    a, b, c = float(a_raw), float(b_raw), float(c_raw)
    negated = False
    if c < 0.0:
        a, b, c = -a, -b, -c
        negated = True
    if a == 0.0:
        raise RejectZeroA("a == 0 (pure Gaussian-curvature relation) is not handled")
    if b == 0.0:
        raise RejectZeroB("b == 0 (constant mean curvature) is not handled")
    if a < 0.0:
        raise RejectNegativeA("a < 0 after sign normalization is not handled")
    delta = a * a + 4.0 * b * c
    tol = tol_delta if tol_delta is not None else 1e-12 * (a * a + 4.0 * abs(b * c))
    if abs(delta) <= tol:
        raise RejectZeroDiscriminant(f"discriminant is zero (a^2 + 4bc = {delta:g})")
    return Coefficients(a, b, c, delta, negated)


def in_domain(p: PhasePoint, tol: float = TOL_DOMAIN) -> bool:
    return p.u >= 0.0 and p.u * p.u + p.v * p.v <= 1.0 + tol


def weingarten_potential(co: Coefficients, p: PhasePoint) -> float:
    """Evaluate the conserved quantity F at a phase point.

    1 - u^2 - v^2 within TOL_DOMAIN of zero (either side) is clamped to
    zero, so points on the unit circle get the boundary limit
    F = b/2 + (c/2) u^2 exactly.

    Raises:
        DomainViolation: point further than TOL_DOMAIN outside the disk.
    """
    u, v = p
    w2 = 1.0 - u * u - v * v
    if w2 < -TOL_DOMAIN:
        raise DomainViolation(f"point ({u:g}, {v:g}) outside the phase domain")
    if w2 < TOL_DOMAIN:
        w2 = 0.0
    w = math.sqrt(w2)
    return 0.5 * (co.a * u * w + co.b * (u * u + v * v) + co.c * u * u)


def potential_gradient(co: Coefficients, p: PhasePoint) -> tuple[float, float]:
    """Analytic gradient (dF/du, dF/dv) at an interior point.

        dF/du = (a/2) w - (a/2) u^2 / w + (b + c) u
        dF/dv = (b - (a/2) u / w) v

    Raises:
        BoundarySingularity: w^2 <= TOL_DOMAIN (the 1/w quotient blows up).
    """
    u, v = p
    w2 = 1.0 - u * u - v * v
    if w2 <= TOL_DOMAIN:
        raise BoundarySingularity(f"gradient undefined at w^2 = {w2:g}")
    w = math.sqrt(w2)
    fu = 0.5 * co.a * w - 0.5 * co.a * u * u / w + (co.b + co.c) * u
    fv = (co.b - 0.5 * co.a * u / w) * v
    return fu, fv


@dataclass(frozen=True)
class CriticalData:
    """Closed-form classification constants of F for one coefficient triple.

    u_plus/u_minus are the two positive roots of t^4 - t^2 +
    a^2 / (4 (a^2 + (b+c)^2)) = 0; exactly one of (u_plus, 0), (u_minus, 0)
    is the interior critical point of F (both coincide when b + c = 0).
    alpha0 is the maximum level, attained only at that critical point, and
    tau parametrizes the horizontal-tangent locus.
    """

    u_plus: float
    u_minus: float
    alpha0: float
    tau: float
    alpha_min: float
    alpha_max: float
    active_critical: str  # "u_plus" | "u_minus" | "both"

    @property
    def critical_points(self) -> list[PhasePoint]:
        if self.active_critical == "u_plus":
            return [PhasePoint(self.u_plus, 0.0)]
        if self.active_critical == "u_minus":
            return [PhasePoint(self.u_minus, 0.0)]
        return [PhasePoint(self.u_plus, 0.0), PhasePoint(self.u_minus, 0.0)]

    @property
    def active_point(self) -> PhasePoint:
        if self.active_critical == "u_minus":
            return PhasePoint(self.u_minus, 0.0)
        return PhasePoint(self.u_plus, 0.0)


def critical_data(co: Coefficients) -> CriticalData:
    """Compute u_plus, u_minus, alpha0, tau and the attainable level range.

    alpha_min is b/2 when b + c <= 0 and min(0, b/2) otherwise; alpha_max
    is always alpha0 = (sqrt(a^2 + (b+c)^2) + (b+c)) / 4.
    """
    a = co.a
    s = co.b + co.c
    r = math.sqrt(a * a + s * s)
    ratio = abs(s) / r
    u_plus = math.sqrt(0.5 * (1.0 + ratio))
    u_minus = math.sqrt(0.5 * (1.0 - ratio))
    alpha0 = 0.25 * r + 0.25 * s
    # tau = r - s, computed in the cancellation-free form for s > 0.
    tau = a * a / (r + s) if s > 0.0 else r - s
    if s <= 0.0:
        alpha_min = 0.5 * co.b
    else:
        alpha_min = min(0.0, 0.5 * co.b)
    if s > 0.0:
        active = "u_plus"
    elif s < 0.0:
        active = "u_minus"
    else:
        active = "both"
    return CriticalData(u_plus, u_minus, alpha0, tau, alpha_min, alpha0, active)


def level_tolerance(co: Coefficients) -> float:
    """Absolute tolerance used to compare levels against alpha0 and range ends."""
    return 1e-9 * (1.0 + abs(critical_data(co).alpha0))


def gamma_locus_intersections(co: Coefficients, alpha: float) -> list[PhasePoint]:
    """Points of C_alpha with horizontal tangent (dF/du = 0).

    The locus is w = (tau/a) u; substituting into F = alpha gives
    (tau - b tau^2 / a^2 + c) u^2 = 2 alpha - b.  Nonempty exactly for
    b/2 < alpha <= alpha0: two mirror points for alpha < alpha0, the single
    critical point at alpha = alpha0.
    """
    cd = critical_data(co)
    tol = level_tolerance(co)
    if alpha <= 0.5 * co.b or alpha > cd.alpha0 + tol:
        return []
    if abs(alpha - cd.alpha0) <= tol:
        return [cd.active_point]
    tau = cd.tau
    coeff = tau - co.b * tau * tau / (co.a * co.a) + co.c
    usq = (2.0 * alpha - co.b) / coeff
    u = math.sqrt(usq)
    vsq = 1.0 - usq * (1.0 + tau * tau / (co.a * co.a))
    v = math.sqrt(max(vsq, 0.0))
    return [PhasePoint(u, v), PhasePoint(u, -v)]


@dataclass(frozen=True)
class BoundaryIntersections:
    """C_alpha meeting the two boundary pieces of the half-disk.

    axis:   points on {u = 0, -1 <= v <= 1}, i.e. b v^2 = 2 alpha;
    circle: points on {u^2 + v^2 = 1, u > 0}, i.e. c u^2 = 2 alpha - b.
    With c = 0 the whole circle sits on the level b/2; that degenerate case
    is flagged instead of enumerated.
    """

    axis: list[PhasePoint]
    circle: list[PhasePoint]
    circle_is_full: bool = False


def boundary_intersections(co: Coefficients, alpha: float) -> BoundaryIntersections:
    """Solve b v^2 = 2 alpha on the axis and c u^2 = 2 alpha - b on the circle."""
    axis: list[PhasePoint] = []
    vsq = 2.0 * alpha / co.b
    if 0.0 <= vsq <= 1.0:
        v = math.sqrt(vsq)
        axis = [PhasePoint(0.0, v)] if v == 0.0 else [PhasePoint(0.0, v), PhasePoint(0.0, -v)]

    circle: list[PhasePoint] = []
    circle_full = False
    if co.c > 0.0:
        usq = (2.0 * alpha - co.b) / co.c
        if 0.0 <= usq <= 1.0:
            u = math.sqrt(usq)
            v = math.sqrt(max(1.0 - usq, 0.0))
            if v == 0.0:
                circle = [PhasePoint(u, 0.0)]
            else:
                circle = [PhasePoint(u, v), PhasePoint(u, -v)]
    else:
        circle_full = abs(2.0 * alpha - co.b) <= 2.0 * level_tolerance(co)
    return BoundaryIntersections(axis, circle, circle_full)


def singular_locus_intersections(co: Coefficients, alpha: float) -> list[PhasePoint]:
    """Points of C_alpha where the profile acceleration blows up.

    These solve a*u = 2*b*w with v != 0, which is possible only for b > 0.
    Restricted to that locus, F = b/2 + (a^2/(8b) + c/2) u^2, so the
    intersection is a single u with a mirror pair of v values.
    """
    if co.b <= 0.0:
        return []
    coeff = co.a * co.a / (8.0 * co.b) + 0.5 * co.c
    usq = (alpha - 0.5 * co.b) / coeff
    if usq <= TOL_DOMAIN:
        return []
    vsq = 1.0 - usq * (1.0 + co.a * co.a / (4.0 * co.b * co.b))
    if vsq <= TOL_DOMAIN:
        return []
    u = math.sqrt(usq)
    v = math.sqrt(vsq)
    return [PhasePoint(u, v), PhasePoint(u, -v)]


class LevelKind(Enum):
    OUT_OF_RANGE = "OutOfRange"
    INCOMPLETE_AXIS = "IncompleteAxis"
    INCOMPLETE_BOUNDARY = "IncompleteBoundary"
    UNCLASSIFIED_ENDPOINT = "UnclassifiedEndpoint"
    COMPLETE_CLOSED_ORBIT = "CompleteClosedOrbit"
    CLIFFORD_TORUS = "CliffordTorus"


@dataclass(frozen=True)
class SpecialSets:
    axis: list[PhasePoint]
    circle: list[PhasePoint]
    gamma: list[PhasePoint]
    circle_is_full: bool = False


@dataclass(frozen=True)
class LevelClassification:
    kind: LevelKind
    detail: str
    singular_locus_hits: list[PhasePoint] = field(default_factory=list)
    special_sets: SpecialSets | None = None


def classify_level(co: Coefficients, alpha: float,
                   tol_level: float | None = None) -> LevelClassification:
    """Assign one taxonomy kind to a level alpha.

    The attainable range is [alpha_min, alpha0].  Open intervals decide:

        (min(0, b/2), max(0, b/2))      -> IncompleteAxis (axis crossing)
        (b/2, (b+c)/2), not the above   -> IncompleteBoundary (circle exit)
        (max(0, (b+c)/2), alpha0)       -> CompleteClosedOrbit
        |alpha - alpha0| <= tol         -> CliffordTorus (equilibrium point)

    alpha sitting exactly on an interval endpoint {0, b/2, (b+c)/2} is
    reported UnclassifiedEndpoint together with its special boundary set
    rather than merged into a neighbor, because the decided statements all
    use open intervals.
    """
    cd = critical_data(co)
    tol = tol_level if tol_level is not None else level_tolerance(co)
    b, c = co.b, co.c
    s = b + c

    bdry = boundary_intersections(co, alpha)
    special = SpecialSets(
        axis=bdry.axis,
        circle=bdry.circle,
        gamma=gamma_locus_intersections(co, alpha),
        circle_is_full=bdry.circle_is_full,
    )
    hits = singular_locus_intersections(co, alpha)

    if alpha < cd.alpha_min - tol or alpha > cd.alpha0 + tol:
        return LevelClassification(
            LevelKind.OUT_OF_RANGE,
            f"alpha = {alpha:g} outside the attainable range "
            f"[{cd.alpha_min:g}, {cd.alpha0:g}]",
            hits, special)

    if abs(alpha - cd.alpha0) <= tol:
        pts = ", ".join(f"({p.u:.6f}, 0)" for p in cd.critical_points)
        return LevelClassification(
            LevelKind.CLIFFORD_TORUS,
            f"level set degenerates to the interior critical point(s) {pts}; "
            "the equilibrium profile is the flat torus of constant height",
            hits, special)

    lo_axis, hi_axis = min(0.0, 0.5 * b), max(0.0, 0.5 * b)
    if lo_axis < alpha < hi_axis:
        return LevelClassification(
            LevelKind.INCOMPLETE_AXIS,
            "level curve crosses the rotation axis {u=0} at interior points; "
            "the profile meets the axis non-orthogonally (cone point)",
            hits, special)

    if 0.5 * b < alpha < 0.5 * s:
        return LevelClassification(
            LevelKind.INCOMPLETE_BOUNDARY,
            "level curve reaches the unit circle u^2+v^2=1; the profile "
            "derivative saturates there and the solution stops",
            hits, special)

    if max(0.0, 0.5 * s) < alpha < cd.alpha0:
        detail = ("level curve avoids the axis and the unit circle: a smooth "
                  "simple closed curve around the critical point")
        if hits:
            detail += ("; it crosses the acceleration-singular locus a*u = 2*b*w, "
                       "so it is not traversable as a C^2 profile (second "
                       "principal curvature unbounded at the crossing)")
        return LevelClassification(LevelKind.COMPLETE_CLOSED_ORBIT, detail, hits, special)

    # Exactly on a breakpoint (or within rounding of one).
    if special.circle_is_full:
        which = ("alpha = b/2 with c = 0: the level set contains the whole "
                 "quarter circle and the interior umbilic-sphere arc")
    elif alpha == 0.0:
        which = "alpha = 0: the level set meets the axis only at the origin (0,0)"
    elif alpha == 0.5 * b:
        which = ("alpha = b/2: the level curve meets the axis exactly at "
                 "(0,+1) and (0,-1); umbilic-sphere profiles live here for "
                 "b > 0 (reported, not asserted complete)")
    elif alpha == 0.5 * s:
        which = "alpha = (b+c)/2: the level curve touches the circle at (1,0)"
    else:
        which = "alpha within rounding of an interval endpoint {0, b/2, (b+c)/2}"
    return LevelClassification(LevelKind.UNCLASSIFIED_ENDPOINT, which, hits, special)
