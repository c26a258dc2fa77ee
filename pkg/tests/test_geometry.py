"""Curvatures, profile lift, umbilic spheres, meshes, projections."""
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from rlws import (
    Orbit,
    OrbitOutcome,
    PhasePoint,
    build_mesh,
    critical_data,
    integrate_profile,
    isoparametric_test,
    principal_curvatures,
    rotation_angle,
    stereographic_project,
    umbilic_spheres,
    validate_normalize,
    weingarten_potential,
    weingarten_residual,
)
from rlws.errors import (
    AxisSingularity,
    InsufficientSamples,
    PoleOnSurface,
    UnboundedCurvature,
)
from rlws.geometry import SurfaceMesh, MeshMeta, sphere_profile_orbit
from rlws.orbit import axis_adjacent_start, choose_default_start


class TestPrincipalCurvatures:
    def test_clifford_exact_rationals(self, co313):
        # exact values by rational arithmetic: x^2 = 9/10, w^2 = 1/10
        assert Fraction(1, 10) == 1 - Fraction(9, 10)
        kp = principal_curvatures(co313, math.sqrt(0.9), 0.0, 0.0)
        assert abs(kp.k1 - (-1.0 / 3.0)) < 1e-12
        assert abs(kp.k2 - 3.0) < 1e-12
        assert abs(kp.H - 4.0 / 3.0) < 1e-12
        assert abs(kp.K - (-1.0)) < 1e-12
        assert abs(weingarten_residual(co313, kp)) < 1e-12

    def test_symmetric_clifford(self, co1m11):
        kp = principal_curvatures(co1m11, 1 / math.sqrt(2), 0.0, 0.0)
        assert abs(kp.k1 + 1.0) < 1e-12
        assert abs(kp.k2 - 1.0) < 1e-12
        assert abs(kp.H) < 1e-12
        assert abs(kp.K + 1.0) < 1e-12
        assert abs(weingarten_residual(co1m11, kp)) < 1e-12

    def test_relation_form_matches_quotient_form(self, co313, orbit21_geo):
        orb = orbit21_geo
        for i in range(0, orb.n_samples, 7):
            x, v, xdd = orb.x[i], orb.xdot[i], orb.xddot[i]
            kq = principal_curvatures(co313, x, v, xdd)
            kr = principal_curvatures(co313, x, v, from_relation=True)
            assert abs(kq.k2 - kr.k2) < 1e-7 * (1 + abs(kr.k2))

    def test_unbounded_flag_on_locus(self, co110):
        kp = principal_curvatures(co110, 0.6324555320336759, 0.7071067811865476,
                                  from_relation=True)
        assert kp.k2_unbounded
        with pytest.raises(UnboundedCurvature):
            weingarten_residual(co110, kp)

    def test_axis_guard(self, co313):
        with pytest.raises(AxisSingularity):
            principal_curvatures(co313, 0.0, 0.5, 0.0)

    def test_zero_curvatures_residual(self, co313):
        from rlws.geometry import CurvaturePair
        assert weingarten_residual(co313, CurvaturePair(0, 0, 0.0, 0.0)) == -3.0


@pytest.fixture(scope="module")
def orbit21_geo(co313):
    start, _ = choose_default_start(co313, 2.1)
    return integrate_profile(co313, 2.1, start)


@pytest.fixture(scope="module")
def sphere_orbit_integrated(co110):
    from rlws import IntegrateOptions
    start = axis_adjacent_start(co110, 0.5, eps=1e-4)
    return integrate_profile(co110, 0.5, start,
                             IntegrateOptions(max_step=0.01))


class TestRotationAngle:
    def test_constant_profile_linear_theta(self, co313):
        # constant x = sqrt(0.9): theta(s) = sqrt(10) * s
        s = np.linspace(0.0, 1.0, 101)
        x = np.full_like(s, math.sqrt(0.9))
        orb = Orbit(co313, 2.25, s, x, np.zeros_like(s), np.zeros_like(s),
                    np.zeros_like(s), OrbitOutcome.TRUNCATED)
        rotation_angle(orb)
        assert np.max(np.abs(orb.theta - math.sqrt(10.0) * s)) < 1e-9

    def test_sphere_total_sweep(self, co110):
        # independent quadrature oracle for the geodesic-sphere profile
        sp = umbilic_spheres(co110)[0]
        orb = sphere_profile_orbit(co110, sp.rho, n=4001)
        rotation_angle(orb)
        sr = math.sin(sp.rho)
        cr = math.cos(sp.rho)

        def integrand(phi):
            return math.sin(phi) * cr * sr / (1 - sr * sr * math.sin(phi) ** 2)

        expected, _ = quad(integrand, 0.0, math.pi)
        assert abs((orb.theta[-1] - orb.theta[0]) - expected) < 1e-6
        # for rho = pi/4 the sweep is exactly pi/2
        assert abs(expected - math.pi / 2) < 1e-10

    def test_monotone(self, orbit21_geo):
        rotation_angle(orbit21_geo)
        assert np.all(np.diff(orbit21_geo.theta) >= 0)

    def test_zero_at_s_zero(self, sphere_orbit_integrated):
        orb = rotation_angle(sphere_orbit_integrated)
        i0 = int(np.argmin(np.abs(orb.s)))
        assert orb.theta[i0] == 0.0


class TestUmbilicSpheres:
    def test_c_zero(self, co110):
        (sp,) = umbilic_spheres(co110)
        assert abs(sp.rho - math.pi / 4) < 1e-15
        assert abs(sp.k + 1.0) < 1e-15

    def test_hyperbolic_none(self, co1m11):
        assert umbilic_spheres(co1m11) == []

    def test_clifford_family(self, co313):
        (sp,) = umbilic_spheres(co313)
        t = math.tan(sp.rho)
        assert abs(t - (-3 + math.sqrt(21)) / 6) < 1e-12
        assert abs(sp.rho - 0.25795) < 1e-4
        assert abs(sp.k + 3.791288) < 1e-5
        # k solves the curvature relation b k^2 + a k - c = 0
        assert abs(co313.b * sp.k ** 2 + co313.a * sp.k - co313.c) < 1e-9

    def test_profile_sits_on_level_b_half(self, co313, co110):
        for co in (co313, co110):
            for sp in umbilic_spheres(co):
                orb = sphere_profile_orbit(co, sp.rho, n=501)
                for i in range(0, orb.n_samples, 25):
                    f = weingarten_potential(co, PhasePoint(orb.x[i], orb.xdot[i]))
                    assert abs(f - 0.5 * co.b) < 1e-10


class TestIsoparametric:
    def test_clifford_equilibrium_constant(self, co313):
        cd = critical_data(co313)
        orb = integrate_profile(co313, 2.25, cd.active_point)
        res = isoparametric_test(co313, orb)
        assert res.is_isoparametric
        assert abs(res.k1_min + 1.0 / 3.0) < 1e-12

    def test_closed_orbit_not_constant(self, co110):
        start, _ = choose_default_start(co110, 0.602)
        orb = integrate_profile(co110, 0.602, start)
        res = isoparametric_test(co110, orb)
        assert not res.is_isoparametric
        assert abs(res.k1_min + 0.4695) < 1e-3
        assert abs(res.k1_max + 0.3610) < 1e-3

    def test_sphere_constant(self, co110, sphere_orbit_integrated):
        res = isoparametric_test(co110, sphere_orbit_integrated)
        assert abs(res.k1_min + 1.0) < 1e-4
        assert abs(res.k1_max + 1.0) < 1e-4

    def test_family_avoids_isoparametric(self, co110):
        # c = 0 family: every closed orbit off the sphere level has
        # non-constant k1
        alpha0 = critical_data(co110).alpha0
        for alpha in np.linspace(0.602, alpha0 - 1e-3, 6):
            start, _ = choose_default_start(co110, float(alpha))
            orb = integrate_profile(co110, float(alpha), start)
            assert orb.outcome is OrbitOutcome.CLOSED_PERIODIC
            assert not isoparametric_test(co110, orb).is_isoparametric

    def test_insufficient_samples(self, co313, orbit21_geo):
        with pytest.raises(InsufficientSamples):
            isoparametric_test(co313, orbit21_geo,
                               min_samples=orbit21_geo.n_samples + 1)


class TestBuildMesh:
    def test_clifford_torus(self, co313):
        cd = critical_data(co313)
        orb = integrate_profile(co313, 2.25, cd.active_point)
        mesh = build_mesh(orb, n_t=64)
        assert mesh.meta.closed_s
        assert mesh.vertices.shape == (64 * 64, 4)
        norms = np.linalg.norm(mesh.vertices, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-12
        # constant radius pair (sqrt(0.9), sqrt(0.1))
        r_xy = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
        r_zw = np.hypot(mesh.vertices[:, 2], mesh.vertices[:, 3])
        assert np.max(np.abs(r_xy - math.sqrt(0.9))) < 1e-12
        assert np.max(np.abs(r_zw - math.sqrt(0.1))) < 1e-12

    def test_sphere_pole_caps(self, sphere_orbit_integrated):
        mesh = build_mesh(sphere_orbit_integrated, n_t=32)
        # two pole vertices appended after the grid
        assert mesh.vertices.shape[0] == mesh.n_rows * 32 + 2
        norms = np.linalg.norm(mesh.vertices, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-9
        tri = [f for f in mesh.faces if len(f) == 3]
        assert len(tri) == 2 * 32

    def test_closed_orbit_rotation_number(self, orbit21_geo):
        mesh = build_mesh(orbit21_geo, n_t=16)
        assert mesh.meta.rotation_number is not None
        assert 0.0 < mesh.meta.rotation_number < 1.0
        norms = np.linalg.norm(mesh.vertices, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-9

    def test_bad_n_t(self, orbit21_geo):
        with pytest.raises(ValueError):
            build_mesh(orbit21_geo, n_t=2)


def _tiny_mesh(points):
    co = validate_normalize(3, 1, 3)
    return SurfaceMesh(np.asarray(points, dtype=float), [], 1, len(points),
                       MeshMeta(co, 0.0, None, False))


class TestStereographicProjection:
    def test_equator_fixed(self):
        mesh = _tiny_mesh([[1.0, 0.0, 0.0, 0.0]])
        proj = stereographic_project(mesh, pole=4)
        assert np.allclose(proj.vertices[0], [1.0, 0.0, 0.0])

    def test_antipode_to_origin(self):
        mesh = _tiny_mesh([[0.0, 0.0, 0.0, -1.0]])
        proj = stereographic_project(mesh, pole=4)
        assert np.allclose(proj.vertices[0], [0.0, 0.0, 0.0])

    def test_pole_on_surface(self):
        mesh = _tiny_mesh([[0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0]])
        with pytest.raises(PoleOnSurface):
            stereographic_project(mesh, pole=4)

    def test_clifford_torus_image(self, co1m11):
        cd = critical_data(co1m11)
        orb = integrate_profile(co1m11, 0.25, cd.critical_points[0])
        mesh = build_mesh(orb, n_t=64)
        proj = stereographic_project(mesh, pole=4)
        d = np.hypot(proj.vertices[:, 0], proj.vertices[:, 1])
        assert abs(d.min() - (math.sqrt(2) - 1)) < 1e-6
        assert abs(d.max() - (math.sqrt(2) + 1)) < 1e-6

    def test_auto_pole_valid(self, orbit21_geo):
        mesh = build_mesh(orbit21_geo, n_t=16)
        proj = stereographic_project(mesh)
        assert proj.pole in (1, -1, 2, -2, 3, -3, 4, -4)
        assert np.all(np.isfinite(proj.vertices))
