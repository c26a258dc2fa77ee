# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: grid evaluation, profile integration, curve tracing.

Statement-for-statement twin of rlws._kernels_py (same expressions, same
evaluation order, compiled with -ffp-contract=off) so results match the
pure-Python backend bit for bit.  Keep the two files in sync.
"""
import math

import numpy as np

from libc.math cimport fabs, isfinite, pow, sqrt

cdef double TOL_DOMAIN = 1e-12
cdef double D_INF = float("inf")
cdef double D_NAN = float("nan")

OUT_TRUNCATED = 0
OUT_CLOSED = 1
OUT_AXIS_LIMIT = 2
OUT_AXIS_CROSS = 3
OUT_CIRCLE = 4
OUT_SINGULAR = 5
OUT_DIVERGED = -1
OUT_STEP_BUDGET = -2

TRACE_BUDGET = 0
TRACE_CLOSED = 1
TRACE_BOUNDARY = 2
TRACE_STALL = 3

SIDE_NONE = 0
SIDE_AXIS = 1
SIDE_CIRCLE = 2

cdef double B21 = 1.0 / 5.0
cdef double B31 = 3.0 / 40.0
cdef double B32 = 9.0 / 40.0
cdef double B41 = 3.0 / 10.0
cdef double B42 = -9.0 / 10.0
cdef double B43 = 6.0 / 5.0
cdef double B51 = -11.0 / 54.0
cdef double B52 = 5.0 / 2.0
cdef double B53 = -70.0 / 27.0
cdef double B54 = 35.0 / 27.0
cdef double B61 = 1631.0 / 55296.0
cdef double B62 = 175.0 / 512.0
cdef double B63 = 575.0 / 13824.0
cdef double B64 = 44275.0 / 110592.0
cdef double B65 = 253.0 / 4096.0
cdef double C1 = 37.0 / 378.0
cdef double C3 = 250.0 / 621.0
cdef double C4 = 125.0 / 594.0
cdef double C6 = 512.0 / 1771.0
cdef double DC1 = 37.0 / 378.0 - 2825.0 / 27648.0
cdef double DC3 = 250.0 / 621.0 - 18575.0 / 48384.0
cdef double DC4 = 125.0 / 594.0 - 13525.0 / 55296.0
cdef double DC5 = -277.0 / 14336.0
cdef double DC6 = 512.0 / 1771.0 - 1.0 / 4.0


def grid_eval(double a, double b, double c, int n):
    """F on the n x n grid over [0,1] x [-1,1], w^2 clamped outside the disk."""
    cdef double du = 1.0 / (n - 1)
    cdef double dv = 2.0 / (n - 1)
    out = np.empty((n, n))
    cdef double[:, ::1] F = out
    vbuf = np.empty(n)
    cdef double[::1] v2 = vbuf
    cdef int i, j
    cdef double u, uu_i, w2, w, au, cuu, vj
    for j in range(n):
        vj = -1.0 + j * dv
        v2[j] = vj * vj
    for i in range(n):
        u = i * du
        uu_i = u * u
        au = a * u
        cuu = c * uu_i
        for j in range(n):
            w2 = 1.0 - uu_i - v2[j]
            if w2 < TOL_DOMAIN:
                w2 = 0.0
            w = sqrt(w2)
            F[i, j] = 0.5 * (au * w + b * (uu_i + v2[j]) + cuu)
    return out


cdef inline double _fval(double a, double b, double c, double u, double v) noexcept:
    cdef double w2 = 1.0 - u * u - v * v
    cdef double w
    if w2 < TOL_DOMAIN:
        w2 = 0.0
    w = sqrt(w2)
    return 0.5 * (a * u * w + b * (u * u + v * v) + c * u * u)


cdef inline int _fgrad(double a, double b, double c, double u, double v,
                       double* fu, double* fv, double* w2) noexcept:
    w2[0] = 1.0 - u * u - v * v
    cdef double w
    if w2[0] <= TOL_DOMAIN:
        fu[0] = 0.0
        fv[0] = 0.0
        return 0
    w = sqrt(w2[0])
    fu[0] = 0.5 * a * w - 0.5 * a * u * u / w + (b + c) * u
    fv[0] = (b - 0.5 * a * u / w) * v
    return 1


cdef inline double _accel(double a, double b, double c, double x, double v) noexcept:
    cdef double w2 = 1.0 - x * x - v * v
    cdef double w, den
    if w2 < 0.0:
        w2 = 0.0
    w = sqrt(w2)
    den = a * x - 2.0 * b * w
    if den == 0.0:
        return D_INF
    return w * (2.0 * c * x + a * w) / den - x


cdef inline double _gfac(double a, double b, double x, double v) noexcept:
    cdef double w2 = 1.0 - x * x - v * v
    if w2 <= TOL_DOMAIN:
        return -D_INF if b < a else D_INF
    return b - 0.5 * a * x / sqrt(w2)


cdef inline void _ck_state(double a, double b, double c, double x, double v,
                           double h, double* xh, double* vh,
                           double* ex, double* ev) noexcept:
    cdef double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v, k5x, k5v, k6x, k6v
    cdef double x2, v2, x3, v3, x4, v4, x5, v5, x6, v6
    k1x = v
    k1v = _accel(a, b, c, x, v)
    x2 = x + h * (B21 * k1x)
    v2 = v + h * (B21 * k1v)
    k2x = v2
    k2v = _accel(a, b, c, x2, v2)
    x3 = x + h * (B31 * k1x + B32 * k2x)
    v3 = v + h * (B31 * k1v + B32 * k2v)
    k3x = v3
    k3v = _accel(a, b, c, x3, v3)
    x4 = x + h * (B41 * k1x + B42 * k2x + B43 * k3x)
    v4 = v + h * (B41 * k1v + B42 * k2v + B43 * k3v)
    k4x = v4
    k4v = _accel(a, b, c, x4, v4)
    x5 = x + h * (B51 * k1x + B52 * k2x + B53 * k3x + B54 * k4x)
    v5 = v + h * (B51 * k1v + B52 * k2v + B53 * k3v + B54 * k4v)
    k5x = v5
    k5v = _accel(a, b, c, x5, v5)
    x6 = x + h * (B61 * k1x + B62 * k2x + B63 * k3x + B64 * k4x + B65 * k5x)
    v6 = v + h * (B61 * k1v + B62 * k2v + B63 * k3v + B64 * k4v + B65 * k5v)
    k6x = v6
    k6v = _accel(a, b, c, x6, v6)
    xh[0] = x + h * (C1 * k1x + C3 * k3x + C4 * k4x + C6 * k6x)
    vh[0] = v + h * (C1 * k1v + C3 * k3v + C4 * k4v + C6 * k6v)
    ex[0] = h * (DC1 * k1x + DC3 * k3x + DC4 * k4x + DC5 * k5x + DC6 * k6x)
    ev[0] = h * (DC1 * k1v + DC3 * k3v + DC4 * k4v + DC5 * k5v + DC6 * k6v)


cdef inline double _do_project(double a, double b, double c, double alpha,
                               double* x, double* v, double tol) noexcept:
    cdef double pre = fabs(_fval(a, b, c, x[0], v[0]) - alpha)
    cdef double r, fu, fv, w2, g2, t
    cdef int i
    for i in range(3):
        r = _fval(a, b, c, x[0], v[0]) - alpha
        if fabs(r) <= tol:
            break
        if _fgrad(a, b, c, x[0], v[0], &fu, &fv, &w2) == 0:
            break
        g2 = fu * fu + fv * fv
        if g2 < 1e-28:
            break
        t = r / g2
        x[0] = x[0] - t * fu
        v[0] = v[0] - t * fv
    return pre


cdef void _bisect_event(double a, double b, double c, double x, double v,
                        double h, int kind, double target,
                        double* t_out, double* x_out, double* v_out) noexcept:
    cdef double lo = 0.0
    cdef double hi = 1.0
    cdef double glo, gm, mid, xm, vm, ex, ev, t
    cdef int i
    if kind == 0:
        glo = x - target
    elif kind == 1:
        glo = (1.0 - x * x - v * v) - target
    else:
        glo = v - target
    for i in range(80):
        mid = 0.5 * (lo + hi)
        _ck_state(a, b, c, x, v, mid * h, &xm, &vm, &ex, &ev)
        if kind == 0:
            gm = xm - target
        elif kind == 1:
            gm = (1.0 - xm * xm - vm * vm) - target
        else:
            gm = vm - target
        if (gm < 0.0) == (glo < 0.0):
            lo = mid
            glo = gm
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    _ck_state(a, b, c, x, v, t * h, &xm, &vm, &ex, &ev)
    t_out[0] = t
    x_out[0] = xm
    v_out[0] = vm


def _grow(arr, int cap):
    out = np.empty(cap)
    out[:len(arr)] = arr
    return out


def integrate_core(double a, double b, double c, double alpha,
                   double x0, double v0,
                   double rtol, double atol, double h0, double h_min,
                   double max_step, double max_s, long max_steps,
                   double axis_tol, double boundary_tol, double sing_tol,
                   double switch_tol, double closure_tol,
                   double proj_tol, double stall_tol):
    """See rlws._kernels_py.integrate_core; identical semantics, compiled."""
    cdef int cap = 4096
    sb_o = np.empty(cap); xb_o = np.empty(cap); vb_o = np.empty(cap)
    ab_o = np.empty(cap); db_o = np.empty(cap)
    cdef double[::1] sb = sb_o
    cdef double[::1] xb = xb_o
    cdef double[::1] vb = vb_o
    cdef double[::1] ab = ab_o
    cdef double[::1] db = db_o
    cdef int m = 0
    cross_u = []
    cross_s = []

    cdef double g_scale = fabs(b) + 0.5 * a
    cdef double sing_thresh = sing_tol * g_scale
    cdef double switch_thresh = switch_tol * g_scale

    cdef double x = x0
    cdef double v = v0
    cdef double s = 0.0
    _do_project(a, b, c, alpha, &x, &v, proj_tol)
    cdef double pre_proj_max = 0.0

    cdef int outcome = OUT_TRUNCATED
    cdef double event_u = D_NAN
    cdef double event_v = D_NAN
    cdef double event_s = D_NAN
    cdef double period = D_NAN

    # emit of the initial sample (inline; loop emits rebind on growth)
    sb[m] = s; xb[m] = x; vb[m] = v
    ab[m] = _accel(a, b, c, x, v)
    db[m] = fabs(_fval(a, b, c, x, v) - alpha)
    m += 1

    cdef bint have_first = 0
    cdef int first_dir = 0
    cdef double first_u = 0.0
    cdef double first_s = 0.0
    cdef double acc0
    if v == 0.0:
        acc0 = _accel(a, b, c, x, v)
        if acc0 > 0.0:
            have_first = 1; first_dir = 1; first_u = x; first_s = 0.0
        elif acc0 < 0.0:
            have_first = 1; first_dir = -1; first_u = x; first_s = 0.0
        if have_first:
            cross_u.append(x)
            cross_s.append(0.0)

    cdef double g_prev = _gfac(a, b, x, v)
    cdef bint mode_cont = b > 0.0 and v != 0.0 and fabs(g_prev) < switch_thresh

    cdef double h = h0
    cdef long steps = 0
    cdef double fu, fv, w2, gn, g, eta, tu, tv, sig, xp, vp, gp, phi, phip
    cdef double fup, fvp, w2p, gnp
    cdef double lo_x, lo_v, glo2, hi_x, hi_v, mx, mv, gm2, hx, hv, frac, s_hit
    cdef double x5, v5, ex, ev, tx, tv_, ratio, fac, h_new, w2c, gc
    cdef double s_new, x_old, v_old, w2_new, d1, d2, t, xa, va, sa
    cdef double xbnd, vbnd, sbnd, nrm, g_new, prer, xc, vc, sc, rc, fuc, fvc, w2cc
    cdef int hit_corner, direction, it

    while True:
        steps += 1
        if steps > max_steps:
            outcome = OUT_STEP_BUDGET
            break
        if s >= max_s:
            outcome = OUT_TRUNCATED
            break

        if mode_cont:
            if _fgrad(a, b, c, x, v, &fu, &fv, &w2) == 0:
                outcome = OUT_CIRCLE
                event_u = x; event_v = v; event_s = s
                break
            gn = sqrt(fu * fu + fv * fv)
            if gn < stall_tol:
                outcome = OUT_DIVERGED
                break
            g = _gfac(a, b, x, v)
            eta = 1.0 if g >= 0.0 else -1.0
            tu = eta * fv / gn
            tv = -eta * fu / gn
            sig = fabs(g) / g_scale * 0.05
            if sig > 1e-3:
                sig = 1e-3
            if sig < 1e-10:
                sig = 1e-10
            xp = x + sig * tu
            vp = v + sig * tv
            _do_project(a, b, c, alpha, &xp, &vp, proj_tol)
            gp = _gfac(a, b, xp, vp)
            phi = fabs(g) / gn
            if _fgrad(a, b, c, xp, vp, &fup, &fvp, &w2p) != 0:
                gnp = sqrt(fup * fup + fvp * fvp)
            else:
                gnp = 0.0
            phip = fabs(gp) / gnp if gnp > 0.0 else phi
            if (gp < 0.0) != (g < 0.0):
                lo_x = x; lo_v = v; glo2 = g
                hi_x = xp; hi_v = vp
                for it in range(80):
                    mx = 0.5 * (lo_x + hi_x)
                    mv = 0.5 * (lo_v + hi_v)
                    _do_project(a, b, c, alpha, &mx, &mv, proj_tol)
                    gm2 = _gfac(a, b, mx, mv)
                    if (gm2 < 0.0) == (glo2 < 0.0):
                        lo_x = mx; lo_v = mv; glo2 = gm2
                    else:
                        hi_x = mx; hi_v = mv
                hx = 0.5 * (lo_x + hi_x)
                hv = 0.5 * (lo_v + hi_v)
                _do_project(a, b, c, alpha, &hx, &hv, proj_tol)
                frac = sqrt((hx - x) * (hx - x) + (hv - v) * (hv - v)) / sig
                s_hit = s + 0.5 * (phi + 0.0) * sig * frac
                if m == cap:
                    cap *= 2
                    sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                    vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                    db_o = _grow(db_o, cap)
                    sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
                sb[m] = s_hit; xb[m] = hx; vb[m] = hv
                ab[m] = _accel(a, b, c, hx, hv)
                db[m] = fabs(_fval(a, b, c, hx, hv) - alpha)
                m += 1
                outcome = OUT_SINGULAR
                event_u = hx; event_v = hv; event_s = s_hit
                break
            s = s + 0.5 * (phi + phip) * sig
            x = xp; v = vp
            if m == cap:
                cap *= 2
                sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                db_o = _grow(db_o, cap)
                sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
            sb[m] = s; xb[m] = x; vb[m] = v
            ab[m] = _accel(a, b, c, x, v)
            db[m] = fabs(_fval(a, b, c, x, v) - alpha)
            m += 1
            if fabs(gp) > 2.0 * switch_thresh and fabs(gp) > fabs(g):
                mode_cont = 0
                h = h0
            g_prev = gp
            continue

        if h > max_step:
            h = max_step
        if h > max_s - s:
            h = max_s - s
        if h < h_min:
            h = h_min
        _ck_state(a, b, c, x, v, h, &x5, &v5, &ex, &ev)
        if isfinite(x5) and isfinite(v5) and isfinite(ex) and isfinite(ev):
            tx = atol + rtol * (fabs(x) if fabs(x) > fabs(x5) else fabs(x5))
            tv_ = atol + rtol * (fabs(v) if fabs(v) > fabs(v5) else fabs(v5))
            ratio = fabs(ex) / tx
            if fabs(ev) / tv_ > ratio:
                ratio = fabs(ev) / tv_
        else:
            ratio = D_INF
        if ratio > 1.0:
            if not isfinite(ratio):
                fac = 0.2
            else:
                fac = 0.9 * pow(ratio, -0.2)
                if fac < 0.2:
                    fac = 0.2
            h_new = h * fac
            if h_new < h_min:
                w2c = 1.0 - x * x - v * v
                gc = _gfac(a, b, x, v)
                if w2c < 64.0 * boundary_tol:
                    outcome = OUT_CIRCLE
                    event_u = x; event_v = v; event_s = s
                elif b > 0.0 and fabs(gc) < 8.0 * switch_thresh:
                    mode_cont = 1
                    continue
                else:
                    outcome = OUT_DIVERGED
                break
            h = h_new
            continue

        s_new = s + h
        x_old = x; v_old = v
        w2_new = 1.0 - x5 * x5 - v5 * v5

        hit_corner = 0
        if x5 < x_old:
            d1 = x5 * x5 + (v5 - 1.0) * (v5 - 1.0)
            d2 = x5 * x5 + (v5 + 1.0) * (v5 + 1.0)
            if d1 < axis_tol * axis_tol:
                hit_corner = 1
            elif d2 < axis_tol * axis_tol:
                hit_corner = -1
        if hit_corner != 0:
            if m == cap:
                cap *= 2
                sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                db_o = _grow(db_o, cap)
                sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
            sb[m] = s_new; xb[m] = x5; vb[m] = v5
            ab[m] = _accel(a, b, c, x5, v5)
            db[m] = fabs(_fval(a, b, c, x5, v5) - alpha)
            m += 1
            outcome = OUT_AXIS_LIMIT
            event_u = 0.0
            event_v = 1.0 if hit_corner > 0 else -1.0
            event_s = s_new
            break

        if x5 < 0.0:
            _bisect_event(a, b, c, x, v, h, 0, 0.0, &t, &xa, &va)
            sa = s + t * h
            if xa < 0.0:
                xa = 0.0
            if m == cap:
                cap *= 2
                sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                db_o = _grow(db_o, cap)
                sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
            sb[m] = sa; xb[m] = xa; vb[m] = va
            ab[m] = _accel(a, b, c, xa, va)
            db[m] = fabs(_fval(a, b, c, xa, va) - alpha)
            m += 1
            if fabs(va) >= 1.0 - 1e-3:
                outcome = OUT_AXIS_LIMIT
                event_u = 0.0
                event_v = 1.0 if va > 0.0 else -1.0
                event_s = sa
            else:
                outcome = OUT_AXIS_CROSS
                event_u = 0.0; event_v = va; event_s = sa
            break

        if w2_new < boundary_tol:
            _bisect_event(a, b, c, x, v, h, 1, boundary_tol, &t, &xbnd, &vbnd)
            sbnd = s + t * h
            prer = _do_project(a, b, c, alpha, &xbnd, &vbnd, proj_tol)
            if prer > pre_proj_max:
                pre_proj_max = prer
            if m == cap:
                cap *= 2
                sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                db_o = _grow(db_o, cap)
                sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
            sb[m] = sbnd; xb[m] = xbnd; vb[m] = vbnd
            ab[m] = _accel(a, b, c, xbnd, vbnd)
            db[m] = fabs(_fval(a, b, c, xbnd, vbnd) - alpha)
            m += 1
            nrm = sqrt(xbnd * xbnd + vbnd * vbnd)
            outcome = OUT_CIRCLE
            event_u = xbnd / nrm; event_v = vbnd / nrm; event_s = sbnd
            break

        if b > 0.0:
            g_new = _gfac(a, b, x5, v5)
            if (g_new < 0.0) != (g_prev < 0.0):
                mode_cont = 1
                continue
            if fabs(g_new) < switch_thresh and v5 != 0.0:
                prer = _do_project(a, b, c, alpha, &x5, &v5, proj_tol)
                if prer > pre_proj_max:
                    pre_proj_max = prer
                if m == cap:
                    cap *= 2
                    sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                    vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                    db_o = _grow(db_o, cap)
                    sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
                sb[m] = s_new; xb[m] = x5; vb[m] = v5
                ab[m] = _accel(a, b, c, x5, v5)
                db[m] = fabs(_fval(a, b, c, x5, v5) - alpha)
                m += 1
                x = x5; v = v5; s = s_new
                g_prev = g_new
                mode_cont = 1
                continue

        if v_old != 0.0 and (v_old < 0.0) != (v5 < 0.0):
            _bisect_event(a, b, c, x, v, h, 2, 0.0, &t, &xc, &vc)
            sc = s + t * h
            for it in range(2):
                rc = _fval(a, b, c, xc, 0.0) - alpha
                if _fgrad(a, b, c, xc, 0.0, &fuc, &fvc, &w2cc) == 0 or fuc == 0.0:
                    break
                xc = xc - rc / fuc
            direction = 1 if v_old < 0.0 else -1
            cross_u.append(xc)
            cross_s.append(sc)
            if m == cap:
                cap *= 2
                sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
                vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
                db_o = _grow(db_o, cap)
                sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
            sb[m] = sc; xb[m] = xc; vb[m] = 0.0
            ab[m] = _accel(a, b, c, xc, 0.0)
            db[m] = fabs(_fval(a, b, c, xc, 0.0) - alpha)
            m += 1
            if not have_first:
                have_first = 1; first_dir = direction; first_u = xc; first_s = sc
            elif (direction == first_dir and fabs(xc - first_u) < closure_tol
                  and sc - first_s > 1e-3):
                outcome = OUT_CLOSED
                event_u = xc; event_v = 0.0; event_s = sc
                period = sc - first_s
                break

        prer = _do_project(a, b, c, alpha, &x5, &v5, proj_tol)
        if prer > pre_proj_max:
            pre_proj_max = prer
        if m == cap:
            cap *= 2
            sb_o = _grow(sb_o, cap); xb_o = _grow(xb_o, cap)
            vb_o = _grow(vb_o, cap); ab_o = _grow(ab_o, cap)
            db_o = _grow(db_o, cap)
            sb = sb_o; xb = xb_o; vb = vb_o; ab = ab_o; db = db_o
        sb[m] = s_new; xb[m] = x5; vb[m] = v5
        ab[m] = _accel(a, b, c, x5, v5)
        db[m] = fabs(_fval(a, b, c, x5, v5) - alpha)
        m += 1
        x = x5; v = v5; s = s_new
        g_prev = _gfac(a, b, x, v)
        if ratio > 1e-10:
            fac = 0.9 * pow(ratio, -0.2)
            if fac > 5.0:
                fac = 5.0
            h = h * fac
        else:
            h = h * 5.0

    return (sb_o[:m].copy(), xb_o[:m].copy(), vb_o[:m].copy(),
            ab_o[:m].copy(), db_o[:m].copy(),
            outcome, event_u, event_v, event_s, period, pre_proj_max,
            np.asarray(cross_u), np.asarray(cross_s))


def trace_core(double a, double b, double c, double alpha,
               double u0, double v0, double step, double proj_tol,
               double closure_tol, double w2_stop, long max_steps,
               double direction, double stall_tol):
    """See rlws._kernels_py.trace_core; identical semantics, compiled."""
    cdef int cap = 4096
    pu_o = np.empty(cap)
    pv_o = np.empty(cap)
    cdef double[::1] pu = pu_o
    cdef double[::1] pv = pv_o
    cdef int m = 0
    pu[m] = u0; pv[m] = v0; m += 1

    cdef double x = u0
    cdef double v = v0
    cdef double arclen = 0.0
    cdef double h = step
    cdef int code = TRACE_BUDGET
    cdef int side = SIDE_NONE

    cdef double fu, fv, w2, gn, tu, tv, hh, xp, vp, r, fup, fvp, w2p, g2, t
    cdef double dx, dv
    cdef bint ok, conv
    cdef int exit_side
    cdef long it
    cdef int k

    for it in range(max_steps):
        if _fgrad(a, b, c, x, v, &fu, &fv, &w2) == 0:
            code = TRACE_BOUNDARY
            side = SIDE_CIRCLE
            break
        gn = sqrt(fu * fu + fv * fv)
        if gn < stall_tol:
            code = TRACE_STALL
            break
        tu = direction * fv / gn
        tv = -direction * fu / gn
        ok = 0
        exit_side = SIDE_NONE
        hh = h
        while hh >= 1e-13:
            xp = x + hh * tu
            vp = v + hh * tv
            if xp < 0.0:
                exit_side = SIDE_AXIS
                hh = hh * 0.5
                continue
            if 1.0 - xp * xp - vp * vp < w2_stop:
                exit_side = SIDE_CIRCLE
                hh = hh * 0.5
                continue
            conv = 0
            for k in range(6):
                r = _fval(a, b, c, xp, vp) - alpha
                if fabs(r) <= proj_tol:
                    conv = 1
                    break
                if _fgrad(a, b, c, xp, vp, &fup, &fvp, &w2p) == 0:
                    break
                g2 = fup * fup + fvp * fvp
                if g2 < 1e-28:
                    break
                t = r / g2
                xp = xp - t * fup
                vp = vp - t * fvp
            if conv and xp >= 0.0 and 1.0 - xp * xp - vp * vp >= w2_stop:
                ok = 1
                break
            hh = hh * 0.5
        if not ok:
            if exit_side != SIDE_NONE:
                code = TRACE_BOUNDARY
                side = exit_side
            else:
                code = TRACE_STALL
            break
        x = xp; v = vp
        if m == cap:
            cap *= 2
            pu_o = _grow(pu_o, cap)
            pv_o = _grow(pv_o, cap)
            pu = pu_o; pv = pv_o
        pu[m] = x; pv[m] = v; m += 1
        arclen += hh
        h = hh * 2.0
        if h > step:
            h = step
        if arclen > 3.0 * step:
            dx = x - u0
            dv = v - v0
            if dx * dx + dv * dv < closure_tol * closure_tol:
                if m == cap:
                    cap *= 2
                    pu_o = _grow(pu_o, cap)
                    pv_o = _grow(pv_o, cap)
                    pu = pu_o; pv = pv_o
                pu[m] = u0; pv[m] = v0; m += 1
                code = TRACE_CLOSED
                break

    pts = np.empty((m, 2))
    pts[:, 0] = pu_o[:m]
    pts[:, 1] = pv_o[:m]
    return pts, code, side
