"""Geometry on the 3-sphere: curvatures, profile lift, meshes, projections.

The surface generated by a profile (x(s), y(s), z(s)) on the 2-sphere is

    psi(s, t) = (x cos t, x sin t, y, z),

and with y + i z = r e^{i theta}, r = sqrt(1 - x^2), the arclength
constraint fixes d(theta)/ds = w / (1 - x^2) with w = sqrt(1 - x^2 - x'^2)
(derived from r'^2 + r^2 theta'^2 = 1 - x'^2 and r r' = -x x').  Principal
curvatures follow the rotational-surface formulas

    k1 = -w / x  (<= 0 under this orientation),   k2 = (x'' + x) / w;

the opposite orientation would map (a, c) -> (-a, -c) in the linear
relation, so the library fixes k1 <= 0 throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import (
    AxisSingularity,
    BoundaryContact,
    BoundarySingularity,
    EmptyOrbit,
    InsufficientSamples,
    PoleOnSurface,
    UnboundedCurvature,
)
from .orbit import Orbit, OrbitOutcome
from .phase import TOL_W, Coefficients

__all__ = [
    "CurvaturePair",
    "principal_curvatures",
    "weingarten_residual",
    "rotation_angle",
    "UmbilicSphere",
    "umbilic_spheres",
    "sphere_profile_orbit",
    "IsoparametricResult",
    "isoparametric_test",
    "SurfaceMesh",
    "MeshMeta",
    "build_mesh",
    "ProjectedMesh",
    "stereographic_project",
]


@dataclass(frozen=True)
class CurvaturePair:
    k1: float
    k2: float
    H: float
    K: float
    k2_unbounded: bool = False


def principal_curvatures(co: Coefficients, x: float, xdot: float,
                         xddot: float | None = None,
                         from_relation: bool = False) -> CurvaturePair:
    """Principal curvatures at a profile state.

    k1 = -w/x always; k2 = (xddot + x)/w by default, or from the curvature
    relation as (2 c x + a w)/(a x - 2 b w) when `from_relation` is set (or
    when no xddot is supplied).  The relation form stays finite where the
    quotient form is 0/0 on true solutions; it is flagged unbounded when its
    denominator vanishes (the b > 0 singular locus).
    """
    if x <= TOL_W:
        raise AxisSingularity(f"k1 = -w/x undefined at x = {x:g}")
    w2 = 1.0 - x * x - xdot * xdot
    w = math.sqrt(max(w2, 0.0))
    if w <= TOL_W:
        raise BoundarySingularity(f"k2 undefined at w = {w:g}")
    k1 = -w / x
    unbounded = False
    if from_relation or xddot is None:
        den = co.a * x - 2.0 * co.b * w
        if abs(den) <= TOL_W * (co.a + 2.0 * abs(co.b)):
            k2 = math.inf
            unbounded = True
        else:
            k2 = (2.0 * co.c * x + co.a * w) / den
    else:
        k2 = (xddot + x) / w
        if not math.isfinite(k2):
            unbounded = True
    H = 0.5 * (k1 + k2)
    K = k1 * k2
    return CurvaturePair(k1, k2, H, K, unbounded)


def weingarten_residual(co: Coefficients, kp: CurvaturePair) -> float:
    """a*H + b*K - c; zero on exact solutions."""
    if kp.k2_unbounded:
        raise UnboundedCurvature("residual undefined for unbounded k2")
    return co.a * kp.H + co.b * kp.K - co.c


def rotation_angle(orbit: Orbit) -> Orbit:
    """Fill theta along the orbit by quadrature of d(theta)/ds = w/(1 - x^2).

    theta(0) = 0 and theta is nondecreasing (the integrand is nonnegative).
    Raises BoundaryContact if a sample sits on the rim x ~ 1.
    """
    x = orbit.x
    if orbit.n_samples == 0:
        raise EmptyOrbit("cannot lift an empty orbit")
    if np.any(x >= 1.0 - TOL_W):
        raise BoundaryContact("profile touches x = 1; rotation angle diverges")
    if orbit.n_samples == 1:
        orbit.theta = np.zeros(1)
        return orbit
    w = np.sqrt(np.maximum(1.0 - x * x - orbit.xdot * orbit.xdot, 0.0))
    integrand = w / (1.0 - x * x)
    theta = cumulative_simpson(integrand, x=orbit.s, initial=0.0)
    # anchor theta = 0 at s = 0 (bidirectional orbits start mid-array)
    i0 = int(np.argmin(np.abs(orbit.s)))
    theta = theta - theta[i0]
    orbit.theta = theta
    if orbit.outcome is OrbitOutcome.CLOSED_PERIODIC and orbit.period:
        dtheta = float(np.interp(orbit.period, orbit.s, theta))
        orbit.rotation_number = dtheta / (2.0 * math.pi)
    return orbit


@dataclass(frozen=True)
class UmbilicSphere:
    rho: float  # geodesic radius in (0, pi/2)
    k: float    # common principal curvature, k = -cot(rho)


def umbilic_spheres(co: Coefficients) -> list[UmbilicSphere]:
    """Totally umbilic spheres satisfying the relation: b k^2 + a k = c.

    In t = tan(rho) the condition reads c t^2 + a t - b = 0; the admissible
    root t = 2b / (a + sqrt(a^2 + 4bc)) is positive exactly when b > 0
    (c >= 0 makes the discriminant positive then).  Their profiles sit on the
    level alpha = b/2.
    """
    if co.b <= 0.0 or co.delta <= 0.0:
        return []
    t = 2.0 * co.b / (co.a + math.sqrt(co.delta))
    return [UmbilicSphere(math.atan(t), -1.0 / t)]


def sphere_profile_orbit(co: Coefficients, rho: float, n: int = 601,
                         eps: float = 1e-6) -> Orbit:
    """Closed-form geodesic-sphere profile x(s) = sin(rho) sin(s/sin(rho)).

    Test oracle: an exactly known axis-to-axis solution on the level b/2.
    """
    sr = math.sin(rho)
    s = np.linspace(eps * sr, (math.pi - eps) * sr, n)
    phi = s / sr
    x = sr * np.sin(phi)
    v = np.cos(phi)
    xdd = -x / (sr * sr)
    alpha = 0.5 * co.b
    w = np.sqrt(np.maximum(1.0 - x * x - v * v, 0.0))
    drift = np.abs(0.5 * (co.a * x * w + co.b * (x * x + v * v) + co.c * x * x) - alpha)
    return Orbit(co, alpha, s, x, v, xdd, drift, OrbitOutcome.AXIS_LIMIT,
                 outcome_backward=OrbitOutcome.AXIS_LIMIT, axis_sign=-1,
                 f_drift_max=float(drift.max()))


@dataclass(frozen=True)
class IsoparametricResult:
    k1_min: float
    k1_max: float
    k1_stddev: float
    is_isoparametric: bool


def isoparametric_test(co: Coefficients, orbit: Orbit,
                       min_samples: int = 100) -> IsoparametricResult:
    """Constancy test for k1 = -w/x along the orbit.

    Equilibrium orbits are constant by construction and bypass the sample
    count requirement.
    """
    mask = orbit.x > 1e-6
    x = orbit.x[mask]
    v = orbit.xdot[mask]
    if not orbit.equilibrium and len(x) < min_samples:
        raise InsufficientSamples(
            f"{len(x)} usable samples, need {min_samples}")
    w = np.sqrt(np.maximum(1.0 - x * x - v * v, 0.0))
    k1 = -w / x
    k1_min = float(k1.min())
    k1_max = float(k1.max())
    spread = k1_max - k1_min
    return IsoparametricResult(k1_min, k1_max, float(k1.std()),
                               spread <= 1e-6 * (1.0 + abs(k1_max)))


@dataclass(frozen=True)
class MeshMeta:
    coefficients: Coefficients
    alpha: float
    rotation_number: float | None
    closed_s: bool
    pole: int | None = None


@dataclass
class SurfaceMesh:
    """Structured quad mesh of psi(s, t) on the unit 3-sphere.

    vertices[i * n_t + j] = (x_i cos t_j, x_i sin t_j, r_i cos theta_i,
    r_i sin theta_i); optional pole vertices (axis-meeting profiles) are
    appended after the grid and closed with triangle fans.
    """

    vertices: np.ndarray  # (N, 4)
    faces: list[tuple[int, ...]]
    n_rows: int
    n_t: int
    meta: MeshMeta


def _mesh_rows(orbit: Orbit, max_rows: int, q_max: int, rat_tol: float):
    """Select (x_i, theta_i) profile rows, the closure flag and rotation number."""
    if orbit.equilibrium:
        x0 = float(orbit.x[0])
        n_s = 64
        theta = np.arange(n_s) * (2.0 * math.pi / n_s)
        return np.full(n_s, x0), theta, True, None, False, False

    if orbit.theta is None:
        rotation_angle(orbit)
    s, x, theta = orbit.s, orbit.x, orbit.theta

    if orbit.outcome is OrbitOutcome.CLOSED_PERIODIC and orbit.period:
        mask = s < orbit.period - 1e-12
        xs, th = x[mask], theta[mask]
        dtheta = float(np.interp(orbit.period, s, theta))
        rot = dtheta / (2.0 * math.pi)
        frac = Fraction(rot).limit_denominator(q_max)
        q = frac.denominator
        if abs(rot - float(frac)) <= rat_tol and q * len(xs) <= 4 * max_rows:
            rows_x = np.concatenate([xs] * q)
            rows_t = np.concatenate([th + k * dtheta for k in range(q)])
            return rows_x, rows_t, True, rot, False, False
        return xs, th, False, rot, False, False

    pole_lo = orbit.outcome_backward is OrbitOutcome.AXIS_LIMIT
    pole_hi = orbit.outcome is OrbitOutcome.AXIS_LIMIT
    mask = x > 1e-4
    return x[mask], theta[mask], False, None, pole_lo, pole_hi


def build_mesh(orbit: Orbit, n_t: int = 64, max_rows: int = 2048) -> SurfaceMesh:
    """Surface mesh from an orbit: closed in t, closed in s only when the
    rotation number is (nearly) rational p/q with q <= 64.

    Axis-meeting profiles get a collapsed pole vertex (0, 0, cos theta_end,
    sin theta_end) at each axis end, closed by a triangle fan.
    """
    if n_t < 3:
        raise ValueError("n_t must be at least 3")
    if orbit.n_samples == 0:
        raise EmptyOrbit("orbit has no samples")

    rows_x, rows_t, closed_s, rot, pole_lo, pole_hi = _mesh_rows(
        orbit, max_rows, 64, 1e-6)
    if len(rows_x) > max_rows:
        stride = int(math.ceil(len(rows_x) / max_rows))
        idx = np.arange(0, len(rows_x), stride)
        if idx[-1] != len(rows_x) - 1:
            idx = np.append(idx, len(rows_x) - 1)
        rows_x, rows_t = rows_x[idx], rows_t[idx]
    n_rows = len(rows_x)
    if n_rows < 2 and not orbit.equilibrium:
        raise EmptyOrbit("orbit too short to mesh")

    t = np.arange(n_t) * (2.0 * math.pi / n_t)
    r = np.sqrt(np.maximum(1.0 - rows_x * rows_x, 0.0))
    verts = np.empty((n_rows * n_t + int(pole_lo) + int(pole_hi), 4))
    for i in range(n_rows):
        base = i * n_t
        verts[base:base + n_t, 0] = rows_x[i] * np.cos(t)
        verts[base:base + n_t, 1] = rows_x[i] * np.sin(t)
        verts[base:base + n_t, 2] = r[i] * math.cos(rows_t[i])
        verts[base:base + n_t, 3] = r[i] * math.sin(rows_t[i])

    faces: list[tuple[int, ...]] = []
    for i in range(n_rows - 1):
        for j in range(n_t):
            jn = (j + 1) % n_t
            faces.append((i * n_t + j, (i + 1) * n_t + j,
                          (i + 1) * n_t + jn, i * n_t + jn))
    if closed_s and n_rows >= 2:
        i = n_rows - 1
        for j in range(n_t):
            jn = (j + 1) % n_t
            faces.append((i * n_t + j, j, jn, i * n_t + jn))

    pidx = n_rows * n_t
    if pole_lo:
        verts[pidx] = (0.0, 0.0, math.cos(rows_t[0]), math.sin(rows_t[0]))
        for j in range(n_t):
            jn = (j + 1) % n_t
            faces.append((pidx, jn, j))
        pidx += 1
    if pole_hi:
        base = (n_rows - 1) * n_t
        verts[pidx] = (0.0, 0.0, math.cos(rows_t[-1]), math.sin(rows_t[-1]))
        for j in range(n_t):
            jn = (j + 1) % n_t
            faces.append((pidx, base + j, base + jn))

    meta = MeshMeta(orbit.coefficients, orbit.alpha, rot, closed_s)
    return SurfaceMesh(verts, faces, n_rows, n_t, meta)


@dataclass
class ProjectedMesh:
    vertices: np.ndarray  # (N, 3)
    faces: list[tuple[int, ...]]
    pole: int
    meta: MeshMeta


_POLE_ORDER = (1, -1, 2, -2, 3, -3, 4, -4)


def _pole_min_distance(vertices, pole):
    axis = abs(pole) - 1
    sign = 1.0 if pole > 0 else -1.0
    # |v - pole|^2 = 2 - 2 sign * v_axis on the unit sphere
    d2 = 2.0 - 2.0 * sign * vertices[:, axis]
    return math.sqrt(max(float(d2.min()), 0.0))


def stereographic_project(mesh: SurfaceMesh, pole: int | None = None) -> ProjectedMesh:
    """Project the mesh to R^3 from a coordinate pole of the 3-sphere.

    pole is a signed axis index in {+-1, ..., +-4}; None picks the pole
    maximizing the minimum distance to the vertices (ties broken by the
    fixed order +1, -1, +2, -2, +3, -3, +4, -4).

    Raises:
        PoleOnSurface: chosen pole within 1e-3 of a vertex.
    """
    if pole is None:
        best, best_d = None, -1.0
        for cand in _POLE_ORDER:
            d = _pole_min_distance(mesh.vertices, cand)
            if d > best_d:
                best, best_d = cand, d
        pole = best
    d = _pole_min_distance(mesh.vertices, pole)
    if d < 1e-3:
        raise PoleOnSurface(
            f"pole {pole:+d} is {d:.2e} from the surface")
    axis = abs(pole) - 1
    sign = 1.0 if pole > 0 else -1.0
    keep = [k for k in range(4) if k != axis]
    denom = 1.0 - sign * mesh.vertices[:, axis]
    proj = mesh.vertices[:, keep] / denom[:, None]
    meta = MeshMeta(mesh.meta.coefficients, mesh.meta.alpha,
                    mesh.meta.rotation_number, mesh.meta.closed_s, pole)
    return ProjectedMesh(proj, mesh.faces, pole, meta)
