"""Closed-form layer: validation, potential, gradient, critical data, loci."""
import math

import numpy as np
import pytest

from rlws import (
    LevelKind,
    PhasePoint,
    boundary_intersections,
    classify_level,
    critical_data,
    gamma_locus_intersections,
    potential_gradient,
    singular_locus_intersections,
    validate_normalize,
    weingarten_potential,
)
from rlws.errors import (
    BoundarySingularity,
    DomainViolation,
    RejectNegativeA,
    RejectZeroA,
    RejectZeroB,
    RejectZeroDiscriminant,
)

from conftest import random_coefficients


class TestValidateNormalize:
    def test_elliptic_triple(self):
        co = validate_normalize(3, 1, 3)
        assert (co.a, co.b, co.c) == (3.0, 1.0, 3.0)
        assert co.delta == 21.0
        assert not co.negated

    def test_hyperbolic_triple(self):
        co = validate_normalize(1, -1, 1)
        assert co.delta == -3.0

    def test_zero_discriminant_rejected(self):
        with pytest.raises(RejectZeroDiscriminant):
            validate_normalize(2, -1, 1)  # 4 + 4*(-1)(1) = 0

    def test_negative_c_flips_all_signs(self):
        co = validate_normalize(-1, 1, -1)
        assert (co.a, co.b, co.c) == (1.0, -1.0, 1.0)
        assert co.negated
        # delta is flip-invariant
        assert co.delta == validate_normalize(1, -1, 1).delta

    def test_rejections(self):
        with pytest.raises(RejectZeroA):
            validate_normalize(0, 1, 1)
        with pytest.raises(RejectZeroB):
            validate_normalize(1, 0, 1)
        with pytest.raises(RejectNegativeA):
            validate_normalize(-1, -1, 1)  # c >= 0 already, a < 0


class TestPotential:
    def test_clifford_value(self, co313):
        # at the critical point the potential attains alpha0 = 2.25
        val = weingarten_potential(co313, PhasePoint(math.sqrt(0.9), 0.0))
        assert abs(val - 2.25) < 1e-14
        assert abs(val - critical_data(co313).alpha0) < 1e-14

    def test_on_axis_only_quadratic_term(self):
        for a, b, c in [(3, 1, 3), (1, -1, 1), (2, 0.5, 0.25)]:
            co = validate_normalize(a, b, c)
            for v in (0.0, 0.3, -0.9):
                assert weingarten_potential(co, PhasePoint(0.0, v)) == 0.5 * co.b * v * v

    def test_interior_value_exact_form(self, co110):
        # F(0.75, 0.5) = (13 + 3*sqrt(3)) / 32 for (1, 1, 0), w = sqrt(3)/4
        expected = (13.0 + 3.0 * math.sqrt(3.0)) / 32.0
        val = weingarten_potential(co110, PhasePoint(0.75, 0.5))
        assert abs(val - expected) < 1e-15

    def test_domain_violation(self, co313):
        with pytest.raises(DomainViolation):
            weingarten_potential(co313, PhasePoint(0.9, 0.9))

    def test_even_in_v(self, co313, co1m11):
        rng = np.random.default_rng(7)
        for co in (co313, co1m11):
            for _ in range(200):
                u = rng.uniform(0, 1)
                v = rng.uniform(-1, 1)
                if u * u + v * v >= 1.0:
                    continue
                assert (weingarten_potential(co, PhasePoint(u, v))
                        == weingarten_potential(co, PhasePoint(u, -v)))


class TestGradient:
    def test_vanishes_at_critical_point(self, co313):
        fu, fv = potential_gradient(co313, PhasePoint(math.sqrt(0.9), 0.0))
        assert math.hypot(fu, fv) < 1e-10

    def test_fv_zero_on_axis_section(self, co313):
        fu, fv = potential_gradient(co313, PhasePoint(0.4, 0.0))
        assert fv == 0.0
        assert fu != 0.0

    def test_near_zero_fv_on_singular_locus(self, co110):
        # u = 2w there, so the dF/dv factor vanishes
        fu, fv = potential_gradient(co110, PhasePoint(0.6325, 0.7071))
        assert abs(fv) < 5e-4
        assert abs(fu) > 0.1

    def test_boundary_singularity(self, co313):
        with pytest.raises(BoundarySingularity):
            potential_gradient(co313, PhasePoint(0.6, 0.8))

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(42)
        step = 1e-6
        for _ in range(4):
            co = random_coefficients(rng)
            count = 0
            while count < 250:
                u = rng.uniform(0, 1)
                v = rng.uniform(-1, 1)
                if 1 - u * u - v * v <= 1e-3:
                    continue
                fu, fv = potential_gradient(co, PhasePoint(u, v))
                if math.hypot(fu, fv) < 1e-3:
                    continue
                fdu = (weingarten_potential(co, PhasePoint(u + step, v))
                       - weingarten_potential(co, PhasePoint(u - step, v))) / (2 * step)
                fdv = (weingarten_potential(co, PhasePoint(u, v + step))
                       - weingarten_potential(co, PhasePoint(u, v - step))) / (2 * step)
                assert math.hypot(fu - fdu, fv - fdv) / math.hypot(fdu, fdv) < 1e-6
                count += 1


class TestCriticalData:
    def test_clifford_numbers(self, co313):
        cd = critical_data(co313)
        assert abs(cd.u_plus ** 2 - 0.9) < 1e-15
        assert abs(cd.u_minus ** 2 - 0.1) < 1e-15
        assert cd.tau == 1.0
        assert cd.alpha0 == 2.25
        assert cd.alpha_min == 0.0
        assert cd.active_critical == "u_plus"

    def test_symmetric_case(self, co1m11):
        cd = critical_data(co1m11)
        assert abs(cd.u_plus - 1 / math.sqrt(2)) < 1e-15
        assert abs(cd.u_minus - 1 / math.sqrt(2)) < 1e-15
        assert cd.alpha0 == 0.25
        assert cd.alpha_min == -0.5
        assert cd.active_critical == "both"
        assert len(cd.critical_points) == 2

    def test_c_zero_case(self, co110):
        cd = critical_data(co110)
        assert abs(cd.u_plus - 0.9238795325112867) < 1e-12
        assert abs(cd.tau - (math.sqrt(2) - 1)) < 4e-16
        assert abs(cd.alpha0 - (math.sqrt(2) + 1) / 4) < 1e-15
        assert cd.alpha_min == 0.0
        # F at the critical point equals alpha0
        f = weingarten_potential(co110, PhasePoint(cd.u_plus, 0.0))
        assert abs(f - cd.alpha0) < 1e-12 * (1 + cd.alpha0)

    def test_quartic_residual_and_root_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            co = random_coefficients(rng)
            cd = critical_data(co)
            s = co.b + co.c
            coeff = co.a * co.a / (4.0 * (co.a * co.a + s * s))
            for t in (cd.u_plus ** 2, cd.u_minus ** 2):
                assert abs(t * t - t + coeff) < 1e-12
            assert abs(cd.u_plus ** 2 + cd.u_minus ** 2 - 1.0) < 1e-14
            assert cd.tau > 0.0
            r = math.sqrt(co.a * co.a + s * s)
            assert abs(cd.tau - (r - s)) <= 8 * np.finfo(float).eps * max(r, 1.0)

    def test_critical_point_certificate(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            co = random_coefficients(rng)
            cd = critical_data(co)
            for p in cd.critical_points:
                fu, fv = potential_gradient(co, p)
                assert math.hypot(fu, fv) < 1e-10
                f = weingarten_potential(co, p)
                assert abs(f - cd.alpha0) <= 1e-12 * (1 + cd.alpha0)

    def test_against_polynomial_roots_oracle(self, co313):
        # quartic oracle: numpy roots of t^2 - t + a^2/(4(a^2+s^2)) in t = u^2
        s = co313.b + co313.c
        roots = np.roots([1.0, -1.0, co313.a ** 2 / (4 * (co313.a ** 2 + s * s))])
        cd = critical_data(co313)
        assert sorted(abs(r) for r in roots) == pytest.approx(
            [cd.u_minus ** 2, cd.u_plus ** 2], abs=1e-12)


def _locus_intersections_bruteforce(co, alpha, n=200001):
    """Scan the horizontal-tangent locus for F = alpha sign changes."""
    cd = critical_data(co)
    q = 1.0 + (cd.tau / co.a) ** 2
    psi = np.linspace(1e-9, math.pi / 2, n)
    u = np.sin(psi) / math.sqrt(q)
    v = np.cos(psi)
    w = np.sqrt(np.maximum(1 - u * u - v * v, 0))
    f = 0.5 * (co.a * u * w + co.b * (u * u + v * v) + co.c * u * u) - alpha
    out = []
    sign = f[0] > 0
    for i in range(1, n):
        if (f[i] > 0) != sign:
            t = f[i - 1] / (f[i - 1] - f[i])
            out.append((u[i - 1] + t * (u[i] - u[i - 1]),
                        v[i - 1] + t * (v[i] - v[i - 1])))
            sign = f[i] > 0
    return out


class TestGammaLocus:
    def test_clifford_level_two(self, co313):
        pts = gamma_locus_intersections(co313, 2.0)
        assert len(pts) == 2
        u_exact = math.sqrt(27.0 / 35.0)
        v_exact = math.sqrt(1.0 / 7.0)
        assert abs(pts[0].u - u_exact) < 1e-12
        assert abs(abs(pts[0].v) - v_exact) < 1e-12
        for p in pts:
            assert abs(weingarten_potential(co313, p) - 2.0) < 1e-10
        # independent scan along the locus
        brute = _locus_intersections_bruteforce(co313, 2.0)
        assert len(brute) == 1  # scan covers v > 0 only
        assert abs(brute[0][0] - u_exact) < 1e-5
        assert abs(brute[0][1] - v_exact) < 1e-5

    def test_below_b_half_empty(self, co313):
        assert gamma_locus_intersections(co313, 0.4) == []

    def test_at_alpha0_single_point(self, co313):
        pts = gamma_locus_intersections(co313, 2.25)
        assert len(pts) == 1
        assert pts[0] == critical_data(co313).active_point

    def test_c_zero_point(self, co110):
        pts = gamma_locus_intersections(co110, 0.55)
        tau = critical_data(co110).tau
        usq = 0.1 / (tau - tau * tau)
        assert abs(pts[0].u - math.sqrt(usq)) < 1e-12
        for p in pts:
            assert abs(weingarten_potential(co110, p) - 0.55) < 1e-12

    def test_cardinality_property(self):
        rng = np.random.default_rng(3)
        done = 0
        while done < 200:
            co = random_coefficients(rng)
            cd = critical_data(co)
            lo = 0.5 * co.b
            span = cd.alpha0 - lo
            if span <= 1e-6:
                continue
            alpha = lo + rng.uniform(1e-3, 1 - 1e-3) * span
            pts = gamma_locus_intersections(co, alpha)
            assert len(pts) == 2
            for p in pts:
                assert abs(weingarten_potential(co, p) - alpha) < 1e-10
            done += 1


class TestBoundaryIntersections:
    def test_axis_only(self, co313):
        bi = boundary_intersections(co313, 0.25)
        assert len(bi.axis) == 2
        assert abs(abs(bi.axis[0].v) - math.sqrt(0.5)) < 1e-15
        assert bi.circle == []

    def test_circle_only(self, co313):
        bi = boundary_intersections(co313, 1.0)
        assert bi.axis == []  # v^2 = 2 > 1
        assert len(bi.circle) == 2
        assert abs(bi.circle[0].u - math.sqrt(1.0 / 3.0)) < 1e-15
        assert abs(abs(bi.circle[0].v) - math.sqrt(2.0 / 3.0)) < 1e-15

    def test_complete_range_empty(self, co313):
        bi = boundary_intersections(co313, 2.1)
        assert bi.axis == [] and bi.circle == []

    def test_c_zero_full_circle_flag(self, co110):
        assert boundary_intersections(co110, 0.5).circle_is_full
        assert not boundary_intersections(co110, 0.51).circle_is_full

    def test_level_values_exact(self):
        rng = np.random.default_rng(5)
        done = 0
        while done < 200:
            co = random_coefficients(rng)
            cd = critical_data(co)
            alpha = rng.uniform(cd.alpha_min, cd.alpha0)
            bi = boundary_intersections(co, alpha)
            for p in bi.axis:
                assert p.u == 0.0
                assert abs(weingarten_potential(co, p) - alpha) < 1e-12
            for p in bi.circle:
                assert abs(p.u ** 2 + p.v ** 2 - 1.0) < 4e-16
                assert abs(weingarten_potential(co, p) - alpha) < 1e-12
            done += 1


class TestSingularLocus:
    def test_negative_b_empty(self, co1m11):
        for alpha in (-0.4, 0.0, 0.2, 0.25):
            assert singular_locus_intersections(co1m11, alpha) == []

    def test_c_zero_hit(self, co110):
        pts = singular_locus_intersections(co110, 0.55)
        assert len(pts) == 2
        assert abs(pts[0].u - math.sqrt(0.4)) < 1e-12
        assert abs(abs(pts[0].v) - math.sqrt(0.5)) < 1e-12

    def test_c_zero_hit_against_curve_scan(self, co110):
        # oracle: densely sample the level curve, find where |dF/dv| is
        # minimal away from v = 0
        from rlws import contour_oracle
        cs = contour_oracle(co110, 0.55, 1024)
        pts = np.vstack(cs.polylines)
        mask = pts[:, 1] > 0.2
        fv = np.empty(mask.sum())
        sel = pts[mask]
        for i, (u, v) in enumerate(sel):
            w = math.sqrt(max(1 - u * u - v * v, 1e-300))
            fv[i] = abs((co110.b - 0.5 * co110.a * u / w) * v)
        best = sel[np.argmin(fv)]
        assert abs(best[0] - math.sqrt(0.4)) < 5e-3
        assert abs(best[1] - math.sqrt(0.5)) < 5e-3

    def test_high_level_empty(self, co313):
        # on the locus F <= 0.5 + 2.625/3.25 < 2.1
        assert singular_locus_intersections(co313, 2.1) == []
        assert singular_locus_intersections(co313, 2.25) == []

    def test_mid_level_hit(self, co313):
        pts = singular_locus_intersections(co313, 1.0)
        assert len(pts) == 2
        usq = (1.0 - 0.5) / (9.0 / 8.0 + 1.5)
        assert abs(pts[0].u - math.sqrt(usq)) < 1e-12


class TestClassifyLevel:
    @pytest.mark.parametrize("alpha,kind", [
        (2.1, LevelKind.COMPLETE_CLOSED_ORBIT),
        (2.05, LevelKind.COMPLETE_CLOSED_ORBIT),
        (1.0, LevelKind.INCOMPLETE_BOUNDARY),
        (0.25, LevelKind.INCOMPLETE_AXIS),
        (2.25, LevelKind.CLIFFORD_TORUS),
        (3.0, LevelKind.OUT_OF_RANGE),
        (-0.1, LevelKind.OUT_OF_RANGE),
        (0.0, LevelKind.UNCLASSIFIED_ENDPOINT),
        (0.5, LevelKind.UNCLASSIFIED_ENDPOINT),
        (2.0, LevelKind.UNCLASSIFIED_ENDPOINT),
    ])
    def test_clifford_partition(self, co313, alpha, kind):
        assert classify_level(co313, alpha).kind is kind

    def test_complete_orbit_has_empty_boundary_sets(self, co313):
        cls = classify_level(co313, 2.1)
        assert cls.special_sets.axis == []
        assert cls.special_sets.circle == []

    def test_singular_hits_attached(self, co110):
        cls = classify_level(co110, 0.55)
        assert cls.kind is LevelKind.COMPLETE_CLOSED_ORBIT
        assert len(cls.singular_locus_hits) == 2
        assert "not traversable" in cls.detail

    def test_negative_b_axis_priority(self, co1m21):
        # for b < 0 the (b/2, 0) interval carries the axis crossing
        cls = classify_level(co1m21, -0.5)
        assert cls.kind is LevelKind.INCOMPLETE_AXIS
        assert len(cls.special_sets.axis) == 2
        # with b + c < 0, alpha = 0 is the upper endpoint of the union
        assert classify_level(co1m21, 0.0).kind is LevelKind.UNCLASSIFIED_ENDPOINT

    def test_negative_b_positive_sum_zero_is_decided(self):
        # b < 0 < b + c: alpha = 0 sits inside (b/2, (b+c)/2)
        co = validate_normalize(1, -0.2, 1)
        assert classify_level(co, 0.0).kind is LevelKind.INCOMPLETE_BOUNDARY
        assert classify_level(co, -0.05).kind is LevelKind.INCOMPLETE_AXIS

    def test_partition_grid(self, co313, co110, co1m11, co1m21):
        for co in (co313, co110, co1m11, co1m21):
            cd = critical_data(co)
            grid = np.linspace(cd.alpha_min, cd.alpha0, 10_000)
            b, s = co.b, co.b + co.c
            for alpha in grid:
                kind = classify_level(co, alpha).kind
                assert kind is not LevelKind.OUT_OF_RANGE
                if min(0.0, b / 2) < alpha < max(0.0, b / 2):
                    assert kind is LevelKind.INCOMPLETE_AXIS
                elif b / 2 < alpha < s / 2:
                    assert kind is LevelKind.INCOMPLETE_BOUNDARY
                elif (max(0.0, s / 2) < alpha < cd.alpha0
                      and abs(alpha - cd.alpha0) > 1e-9 * (1 + cd.alpha0)):
                    assert kind is LevelKind.COMPLETE_CLOSED_ORBIT
                else:
                    assert kind in (LevelKind.UNCLASSIFIED_ENDPOINT,
                                    LevelKind.CLIFFORD_TORUS)
