"""Pure-Python kernels: grid evaluation, profile integration, curve tracing.

Reference implementation of the hot loops; `rlws._kernels` is the compiled
twin with identical arithmetic (same expressions, same evaluation order).
Keep the two files in sync statement by statement.
"""
import math

import numpy as np

TOL_DOMAIN = 1e-12

# Outcome codes shared with the compiled kernel.
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

# Cash-Karp tableau.
B21 = 1.0 / 5.0
B31 = 3.0 / 40.0
B32 = 9.0 / 40.0
B41 = 3.0 / 10.0
B42 = -9.0 / 10.0
B43 = 6.0 / 5.0
B51 = -11.0 / 54.0
B52 = 5.0 / 2.0
B53 = -70.0 / 27.0
B54 = 35.0 / 27.0
B61 = 1631.0 / 55296.0
B62 = 175.0 / 512.0
B63 = 575.0 / 13824.0
B64 = 44275.0 / 110592.0
B65 = 253.0 / 4096.0
C1 = 37.0 / 378.0
C3 = 250.0 / 621.0
C4 = 125.0 / 594.0
C6 = 512.0 / 1771.0
DC1 = 37.0 / 378.0 - 2825.0 / 27648.0
DC3 = 250.0 / 621.0 - 18575.0 / 48384.0
DC4 = 125.0 / 594.0 - 13525.0 / 55296.0
DC5 = -277.0 / 14336.0
DC6 = 512.0 / 1771.0 - 1.0 / 4.0


def grid_eval(a, b, c, n):
    """F on the n x n grid over [0,1] x [-1,1], w^2 clamped outside the disk."""
    du = 1.0 / (n - 1)
    dv = 2.0 / (n - 1)
    u = np.arange(n) * du
    v = -1.0 + np.arange(n) * dv
    uu = u * u
    vv = v * v
    w2 = 1.0 - uu[:, None] - vv[None, :]
    w2[w2 < TOL_DOMAIN] = 0.0
    w = np.sqrt(w2)
    return 0.5 * (a * u[:, None] * w + b * (uu[:, None] + vv[None, :]) + c * uu[:, None])


def _fval(a, b, c, u, v):
    w2 = 1.0 - u * u - v * v
    if w2 < TOL_DOMAIN:
        w2 = 0.0
    w = math.sqrt(w2)
    return 0.5 * (a * u * w + b * (u * u + v * v) + c * u * u)


def _fgrad(a, b, c, u, v):
    # returns (fu, fv, w2); fu = fv = 0 flags the boundary band via w2
    w2 = 1.0 - u * u - v * v
    if w2 <= TOL_DOMAIN:
        return 0.0, 0.0, w2
    w = math.sqrt(w2)
    fu = 0.5 * a * w - 0.5 * a * u * u / w + (b + c) * u
    fv = (b - 0.5 * a * u / w) * v
    return fu, fv, w2


def _accel(a, b, c, x, v):
    w2 = 1.0 - x * x - v * v
    if w2 < 0.0:
        w2 = 0.0
    w = math.sqrt(w2)
    den = a * x - 2.0 * b * w
    if den == 0.0:
        return math.inf
    return w * (2.0 * c * x + a * w) / den - x


def _gfac(a, b, x, v):
    # g = b - a*u/(2w), the factor of dF/dv whose zero is the singular locus;
    # +-inf on the boundary band keeps comparisons meaningful.
    w2 = 1.0 - x * x - v * v
    if w2 <= TOL_DOMAIN:
        return -math.inf if b < a else math.inf
    return b - 0.5 * a * x / math.sqrt(w2)


def _ck_state(a, b, c, x, v, h):
    # one Cash-Karp step: returns 5th-order state and embedded error estimate
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
    xh = x + h * (C1 * k1x + C3 * k3x + C4 * k4x + C6 * k6x)
    vh = v + h * (C1 * k1v + C3 * k3v + C4 * k4v + C6 * k6v)
    ex = h * (DC1 * k1x + DC3 * k3x + DC4 * k4x + DC5 * k5x + DC6 * k6x)
    ev = h * (DC1 * k1v + DC3 * k3v + DC4 * k4v + DC5 * k5v + DC6 * k6v)
    return xh, vh, ex, ev


def _project(a, b, c, alpha, x, v, tol):
    # Newton steps along grad F back onto the level set; returns the
    # corrected point and the pre-correction residual.
    pre = abs(_fval(a, b, c, x, v) - alpha)
    for _ in range(3):
        r = _fval(a, b, c, x, v) - alpha
        if abs(r) <= tol:
            break
        fu, fv, w2 = _fgrad(a, b, c, x, v)
        if w2 <= TOL_DOMAIN:
            break
        g2 = fu * fu + fv * fv
        if g2 < 1e-28:
            break
        t = r / g2
        x = x - t * fu
        v = v - t * fv
    return x, v, pre


def _bisect_step(a, b, c, x, v, h, kind, target):
    # Find t in (0,1] along the partial step where the event function
    # crosses target.  kind: 0 -> x(t), 1 -> w2(t), 2 -> v(t).
    lo = 0.0
    hi = 1.0
    if kind == 0:
        glo = x - target
    elif kind == 1:
        glo = (1.0 - x * x - v * v) - target
    else:
        glo = v - target
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        xm, vm, _, _ = _ck_state(a, b, c, x, v, mid * h)
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
    xm, vm, _, _ = _ck_state(a, b, c, x, v, t * h)
    return t, xm, vm


def integrate_core(a, b, c, alpha, x0, v0,
                   rtol, atol, h0, h_min, max_step, max_s, max_steps,
                   axis_tol, boundary_tol, sing_tol, switch_tol, closure_tol,
                   proj_tol, stall_tol):
    """Adaptive integration of (x' = v, v' = accel) on the level set F = alpha.

    Projects onto the level set after every accepted step, detects the
    axis-limit / boundary / singular-locus / closure events, and switches to
    arclength continuation along the level curve when the acceleration factor
    g = b - a*u/(2w) approaches zero (where the ODE form is stiff-singular
    but the curve itself is smooth; s is then recovered by quadrature of
    ds/dsigma = |g| / |grad F|).
    """
    s_buf = []
    x_buf = []
    v_buf = []
    xdd_buf = []
    drift_buf = []
    cross_u = []
    cross_s = []

    g_scale = abs(b) + 0.5 * a
    sing_thresh = sing_tol * g_scale
    switch_thresh = switch_tol * g_scale

    x = x0
    v = v0
    s = 0.0
    x, v, _ = _project(a, b, c, alpha, x, v, proj_tol)
    pre_proj_max = 0.0

    outcome = OUT_TRUNCATED
    event_u = math.nan
    event_v = math.nan
    event_s = math.nan
    period = math.nan

    def emit(s_, x_, v_):
        s_buf.append(s_)
        x_buf.append(x_)
        v_buf.append(v_)
        xdd_buf.append(_accel(a, b, c, x_, v_))
        drift_buf.append(abs(_fval(a, b, c, x_, v_) - alpha))

    emit(s, x, v)

    have_first = False
    first_dir = 0
    first_u = 0.0
    first_s = 0.0
    if v == 0.0:
        acc0 = _accel(a, b, c, x, v)
        if acc0 > 0.0:
            have_first, first_dir, first_u, first_s = True, 1, x, 0.0
        elif acc0 < 0.0:
            have_first, first_dir, first_u, first_s = True, -1, x, 0.0
        if have_first:
            cross_u.append(x)
            cross_s.append(0.0)

    g_prev = _gfac(a, b, x, v)
    mode_cont = b > 0.0 and v != 0.0 and abs(g_prev) < switch_thresh

    h = h0
    steps = 0
    done = False
    while not done:
        steps += 1
        if steps > max_steps:
            outcome = OUT_STEP_BUDGET
            break
        if s >= max_s:
            outcome = OUT_TRUNCATED
            break

        if mode_cont:
            # --- continuation along the level curve near the singular locus ---
            fu, fv, w2 = _fgrad(a, b, c, x, v)
            if w2 <= TOL_DOMAIN:
                outcome = OUT_CIRCLE
                event_u, event_v, event_s = x, v, s
                break
            gn = math.sqrt(fu * fu + fv * fv)
            if gn < stall_tol:
                outcome = OUT_DIVERGED
                break
            g = _gfac(a, b, x, v)
            eta = 1.0 if g >= 0.0 else -1.0
            tu = eta * fv / gn
            tv = -eta * fu / gn
            sig = abs(g) / g_scale * 0.05
            if sig > 1e-3:
                sig = 1e-3
            if sig < 1e-10:
                sig = 1e-10
            xp = x + sig * tu
            vp = v + sig * tv
            xp, vp, _ = _project(a, b, c, alpha, xp, vp, proj_tol)
            gp = _gfac(a, b, xp, vp)
            phi = abs(g) / gn
            fup, fvp, w2p = _fgrad(a, b, c, xp, vp)
            gnp = math.sqrt(fup * fup + fvp * fvp)
            phip = abs(gp) / gnp if gnp > 0.0 else phi
            if (gp < 0.0) != (g < 0.0):
                # locus crossed inside this arc: bisect along the chord,
                # reprojecting every midpoint onto the level curve
                lo_x, lo_v, glo = x, v, g
                hi_x, hi_v = xp, vp
                for _ in range(80):
                    mx = 0.5 * (lo_x + hi_x)
                    mv = 0.5 * (lo_v + hi_v)
                    mx, mv, _ = _project(a, b, c, alpha, mx, mv, proj_tol)
                    gm = _gfac(a, b, mx, mv)
                    if (gm < 0.0) == (glo < 0.0):
                        lo_x, lo_v, glo = mx, mv, gm
                    else:
                        hi_x, hi_v = mx, mv
                hx = 0.5 * (lo_x + hi_x)
                hv = 0.5 * (lo_v + hi_v)
                hx, hv, _ = _project(a, b, c, alpha, hx, hv, proj_tol)
                frac = math.sqrt((hx - x) * (hx - x) + (hv - v) * (hv - v)) / sig
                s_hit = s + 0.5 * (phi + 0.0) * sig * frac
                emit(s_hit, hx, hv)
                outcome = OUT_SINGULAR
                event_u, event_v, event_s = hx, hv, s_hit
                break
            s = s + 0.5 * (phi + phip) * sig
            x, v = xp, vp
            emit(s, x, v)
            if abs(gp) > 2.0 * switch_thresh and abs(gp) > abs(g):
                mode_cont = False
                h = h0
            g_prev = gp
            continue

        # --- adaptive ODE stepping ---
        if h > max_step:
            h = max_step
        if h > max_s - s:
            h = max_s - s
        if h < h_min:
            h = h_min
        x5, v5, ex, ev = _ck_state(a, b, c, x, v, h)
        if math.isfinite(x5) and math.isfinite(v5) and math.isfinite(ex) and math.isfinite(ev):
            tx = atol + rtol * max(abs(x), abs(x5))
            tv_ = atol + rtol * max(abs(v), abs(v5))
            ratio = max(abs(ex) / tx, abs(ev) / tv_)
        else:
            ratio = math.inf
        if ratio > 1.0:
            fac = 0.2 if not math.isfinite(ratio) else max(0.2, 0.9 * pow(ratio, -0.2))
            h_new = h * fac
            if h_new < h_min:
                w2c = 1.0 - x * x - v * v
                gc = _gfac(a, b, x, v)
                if w2c < 64.0 * boundary_tol:
                    outcome = OUT_CIRCLE
                    event_u, event_v, event_s = x, v, s
                elif b > 0.0 and abs(gc) < 8.0 * switch_thresh:
                    mode_cont = True
                    continue
                else:
                    outcome = OUT_DIVERGED
                break
            h = h_new
            continue

        s_new = s + h
        x_old, v_old = x, v
        w2_new = 1.0 - x5 * x5 - v5 * v5

        # (1) completeness corner: state enters the axis_tol ball of (0, +-1)
        # while the height decreases
        hit_corner = 0
        if x5 < x_old:
            d1 = x5 * x5 + (v5 - 1.0) * (v5 - 1.0)
            d2 = x5 * x5 + (v5 + 1.0) * (v5 + 1.0)
            if d1 < axis_tol * axis_tol:
                hit_corner = 1
            elif d2 < axis_tol * axis_tol:
                hit_corner = -1
        if hit_corner != 0:
            emit(s_new, x5, v5)
            outcome = OUT_AXIS_LIMIT
            event_u, event_v, event_s = 0.0, float(hit_corner), s_new
            break

        # (2) axis crossing: orthogonal (|v| ~ 1, completeness corner) or a
        # cone point (|v| < 1 - 1e-3, incomplete)
        if x5 < 0.0:
            t, xa, va = _bisect_step(a, b, c, x, v, h, 0, 0.0)
            sa = s + t * h
            if xa < 0.0:
                xa = 0.0
            emit(sa, xa, va)
            if abs(va) >= 1.0 - 1e-3:
                outcome = OUT_AXIS_LIMIT
                event_u = 0.0
                event_v = 1.0 if va > 0.0 else -1.0
                event_s = sa
            else:
                outcome = OUT_AXIS_CROSS
                event_u, event_v, event_s = 0.0, va, sa
            break

        # (3) unit-circle contact: w^2 under the boundary threshold
        if w2_new < boundary_tol:
            t, xb, vb = _bisect_step(a, b, c, x, v, h, 1, boundary_tol)
            sb = s + t * h
            xb, vb, prer = _project(a, b, c, alpha, xb, vb, proj_tol)
            if prer > pre_proj_max:
                pre_proj_max = prer
            emit(sb, xb, vb)
            nrm = math.sqrt(xb * xb + vb * vb)
            outcome = OUT_CIRCLE
            event_u, event_v, event_s = xb / nrm, vb / nrm, sb
            break

        # (4) singular locus approach (b > 0 only): switch to continuation
        if b > 0.0:
            g_new = _gfac(a, b, x5, v5)
            if (g_new < 0.0) != (g_prev < 0.0):
                # overshot the pole: discard the step, continue along the curve
                mode_cont = True
                continue
            if abs(g_new) < switch_thresh and v5 != 0.0:
                x5p, v5p, prer = _project(a, b, c, alpha, x5, v5, proj_tol)
                if prer > pre_proj_max:
                    pre_proj_max = prer
                emit(s_new, x5p, v5p)
                x, v, s = x5p, v5p, s_new
                g_prev = g_new
                mode_cont = True
                continue

        # (5) Poincare section v = 0: record the turning point, close the
        # orbit when a same-direction crossing returns to the first one
        if v_old != 0.0 and (v_old < 0.0) != (v5 < 0.0):
            t, xc, vc = _bisect_step(a, b, c, x, v, h, 2, 0.0)
            sc = s + t * h
            # one-dimensional correction onto the level curve along u
            for _ in range(2):
                rc = _fval(a, b, c, xc, 0.0) - alpha
                fuc, _, w2c = _fgrad(a, b, c, xc, 0.0)
                if w2c <= TOL_DOMAIN or fuc == 0.0:
                    break
                xc = xc - rc / fuc
            direction = 1 if v_old < 0.0 else -1
            cross_u.append(xc)
            cross_s.append(sc)
            emit(sc, xc, 0.0)
            if not have_first:
                have_first, first_dir, first_u, first_s = True, direction, xc, sc
            elif (direction == first_dir and abs(xc - first_u) < closure_tol
                  and sc - first_s > 1e-3):
                outcome = OUT_CLOSED
                event_u, event_v, event_s = xc, 0.0, sc
                period = sc - first_s
                break

        x5, v5, prer = _project(a, b, c, alpha, x5, v5, proj_tol)
        if prer > pre_proj_max:
            pre_proj_max = prer
        emit(s_new, x5, v5)
        x, v, s = x5, v5, s_new
        g_prev = _gfac(a, b, x, v)
        if ratio > 1e-10:
            fac = 0.9 * pow(ratio, -0.2)
            if fac > 5.0:
                fac = 5.0
            h = h * fac
        else:
            h = h * 5.0

    return (np.asarray(s_buf), np.asarray(x_buf), np.asarray(v_buf),
            np.asarray(xdd_buf), np.asarray(drift_buf),
            outcome, event_u, event_v, event_s, period, pre_proj_max,
            np.asarray(cross_u), np.asarray(cross_s))


def trace_core(a, b, c, alpha, u0, v0, step, proj_tol, closure_tol, w2_stop,
               max_steps, direction, stall_tol):
    """Pseudo-arclength tracing of the level curve F = alpha.

    Predictor along the unit tangent (Fv, -Fu)/|grad F| (times `direction`),
    Newton correction back onto the level set after every step.  Stops on
    closure, on domain-boundary contact (side reported, endpoint refinement
    left to the caller) or on step budget.
    """
    pts_u = [u0]
    pts_v = [v0]
    x = u0
    v = v0
    arclen = 0.0
    h = step
    code = TRACE_BUDGET
    side = SIDE_NONE

    for _ in range(max_steps):
        fu, fv, w2 = _fgrad(a, b, c, x, v)
        if w2 <= TOL_DOMAIN:
            code = TRACE_BOUNDARY
            side = SIDE_CIRCLE
            break
        gn = math.sqrt(fu * fu + fv * fv)
        if gn < stall_tol:
            code = TRACE_STALL
            break
        tu = direction * fv / gn
        tv = -direction * fu / gn
        ok = False
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
            conv = False
            for _ in range(6):
                r = _fval(a, b, c, xp, vp) - alpha
                if abs(r) <= proj_tol:
                    conv = True
                    break
                fup, fvp, w2p = _fgrad(a, b, c, xp, vp)
                if w2p <= TOL_DOMAIN:
                    break
                g2 = fup * fup + fvp * fvp
                if g2 < 1e-28:
                    break
                t = r / g2
                xp = xp - t * fup
                vp = vp - t * fvp
            if conv and xp >= 0.0 and 1.0 - xp * xp - vp * vp >= w2_stop:
                ok = True
                break
            hh = hh * 0.5
        if not ok:
            if exit_side != SIDE_NONE:
                code = TRACE_BOUNDARY
                side = exit_side
            else:
                code = TRACE_STALL
            break
        x, v = xp, vp
        pts_u.append(x)
        pts_v.append(v)
        arclen += hh
        h = hh * 2.0
        if h > step:
            h = step
        if arclen > 3.0 * step:
            dx = x - u0
            dv = v - v0
            if dx * dx + dv * dv < closure_tol * closure_tol:
                pts_u.append(u0)
                pts_v.append(v0)
                code = TRACE_CLOSED
                break

    pts = np.empty((len(pts_u), 2))
    pts[:, 0] = pts_u
    pts[:, 1] = pts_v
    return pts, code, side
