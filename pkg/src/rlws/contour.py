"""Brute-force level-curve extraction (marching squares) and set distances.

This is the independent realization of the level curves used to
cross-validate the continuation tracer and to draw phase portraits: sample F
on a regular grid over the bounding box of the half-disk, extract the
isocontour by linear interpolation over cell edges, chain the segments into
polylines and clip them to the domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .phase import Coefficients

__all__ = ["ContourSet", "contour_oracle", "hausdorff_distance"]


@dataclass
class ContourSet:
    alpha: float
    polylines: list[np.ndarray]
    cell_size: float
    error_bound: float
    grid_n: int

    @property
    def n_vertices(self) -> int:
        return sum(len(p) for p in self.polylines)


# local edge index -> (key builder, point builder); cases map to edge pairs
_CASE_SEGMENTS = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)],
    11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}


def _hessian_estimate(F, n):
    # max second difference quotient over the safely interior region
    du = 1.0 / (n - 1)
    dv = 2.0 / (n - 1)
    u = np.arange(n) * du
    v = -1.0 + np.arange(n) * dv
    w2 = 1.0 - (u * u)[:, None] - (v * v)[None, :]
    interior = w2 > 0.02
    d2u = np.abs(F[2:, :] - 2.0 * F[1:-1, :] + F[:-2, :]) / (du * du)
    d2v = np.abs(F[:, 2:] - 2.0 * F[:, 1:-1] + F[:, :-2]) / (dv * dv)
    d2uv = np.abs(F[2:, 2:] - F[2:, :-2] - F[:-2, 2:] + F[:-2, :-2]) / (4.0 * du * dv)
    h = 0.0
    m = interior[1:-1, :]
    if m.any():
        h = max(h, float(d2u[m].max()))
    m = interior[:, 1:-1]
    if m.any():
        h = max(h, float(d2v[m].max()))
    m = interior[1:-1, 1:-1]
    if m.any():
        h = max(h, float(d2uv[m].max()))
    return h


def _clip_to_disk(poly):
    # split a polyline into the pieces inside u^2 + v^2 <= 1, inserting the
    # circle crossings; grid u >= 0 already
    out = []
    cur = []

    def inside(p):
        return p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12

    def crossing(p, q):
        d = q - p
        aa = d @ d
        bb = 2.0 * (p @ d)
        cc = p @ p - 1.0
        disc = bb * bb - 4.0 * aa * cc
        if disc < 0.0 or aa == 0.0:
            return None
        r = math.sqrt(disc)
        for t in ((-bb - r) / (2.0 * aa), (-bb + r) / (2.0 * aa)):
            if -1e-12 <= t <= 1.0 + 1e-12:
                return p + min(max(t, 0.0), 1.0) * d
        return None

    prev = None
    for p in poly:
        if prev is None:
            if inside(p):
                cur.append(p)
        else:
            pi, qi = inside(prev), inside(p)
            if pi and qi:
                cur.append(p)
            elif pi and not qi:
                x = crossing(prev, p)
                if x is not None:
                    cur.append(x)
                if len(cur) > 1:
                    out.append(np.asarray(cur))
                cur = []
            elif not pi and qi:
                x = crossing(prev, p)
                cur = [x] if x is not None else []
                cur.append(p)
            # both outside: drop
        prev = p
    if len(cur) > 1:
        out.append(np.asarray(cur))
    return out


def contour_oracle(co: Coefficients, alpha: float, grid_n: int) -> ContourSet:
    """Marching-squares isocontour of F = alpha on a grid_n x grid_n grid.

    Ambiguous saddle cells are resolved by the cell-center average.  Every
    returned vertex lies on a grid edge with |F - alpha| bounded by the
    stored second-order interpolation estimate (away from the rim, where the
    clamped extension of F is only C^0).
    """
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    n = grid_n
    F = kernels.grid_eval(co.a, co.b, co.c, n)
    du = 1.0 / (n - 1)
    dv = 2.0 / (n - 1)

    above = F > alpha
    a00 = above[:-1, :-1]
    a10 = above[1:, :-1]
    a11 = above[1:, 1:]
    a01 = above[:-1, 1:]
    case = (a00.astype(np.int8) + 2 * a10.astype(np.int8)
            + 4 * a11.astype(np.int8) + 8 * a01.astype(np.int8))
    ii, jj = np.nonzero((case > 0) & (case < 15))

    points: dict[tuple, np.ndarray] = {}
    adj: dict[tuple, list] = {}

    def edge_node(e, i, j):
        if e == 0:
            key = ("H", i, j)
            if key not in points:
                t = (alpha - F[i, j]) / (F[i + 1, j] - F[i, j])
                points[key] = np.array([(i + t) * du, -1.0 + j * dv])
        elif e == 1:
            key = ("V", i + 1, j)
            if key not in points:
                t = (alpha - F[i + 1, j]) / (F[i + 1, j + 1] - F[i + 1, j])
                points[key] = np.array([(i + 1) * du, -1.0 + (j + t) * dv])
        elif e == 2:
            key = ("H", i, j + 1)
            if key not in points:
                t = (alpha - F[i, j + 1]) / (F[i + 1, j + 1] - F[i, j + 1])
                points[key] = np.array([(i + t) * du, -1.0 + (j + 1) * dv])
        else:
            key = ("V", i, j)
            if key not in points:
                t = (alpha - F[i, j]) / (F[i, j + 1] - F[i, j])
                points[key] = np.array([i * du, -1.0 + (j + t) * dv])
        return key

    for i, j in zip(ii.tolist(), jj.tolist()):
        cs = int(case[i, j])
        if cs == 5 or cs == 10:
            center = 0.25 * (F[i, j] + F[i + 1, j] + F[i, j + 1] + F[i + 1, j + 1])
            if cs == 5:
                segs = [(0, 1), (2, 3)] if center > alpha else [(3, 0), (1, 2)]
            else:
                segs = [(3, 0), (1, 2)] if center > alpha else [(0, 1), (2, 3)]
        else:
            segs = _CASE_SEGMENTS[cs]
        for e1, e2 in segs:
            k1 = edge_node(e1, i, j)
            k2 = edge_node(e2, i, j)
            adj.setdefault(k1, []).append(k2)
            adj.setdefault(k2, []).append(k1)

    # chain segments into polylines: open paths from degree-1 nodes first,
    # then remaining cycles; deterministic by sorted node order
    unused = {k: sorted(nbs) for k, nbs in adj.items()}

    def walk(start):
        path = [start]
        cur = start
        while unused[cur]:
            nxt = unused[cur][0]
            unused[cur].remove(nxt)
            unused[nxt].remove(cur)
            path.append(nxt)
            cur = nxt
            if cur == start:
                break
        return path

    polylines = []
    for key in sorted(adj):
        if len(unused[key]) == 1:
            path = walk(key)
            if len(path) > 1:
                polylines.append(np.array([points[k] for k in path]))
    for key in sorted(adj):
        while unused[key]:
            path = walk(key)
            if len(path) > 1:
                polylines.append(np.array([points[k] for k in path]))

    clipped = []
    for poly in polylines:
        clipped.extend(_clip_to_disk(poly))
    cell = dv
    clipped = _stitch_rim_fragments(clipped, cell)

    return ContourSet(alpha, clipped, cell,
                      cell * cell * _hessian_estimate(F, n), n)


def _stitch_rim_fragments(polys, cell):
    # The clamped extension makes contours weave across the rim where the
    # level curve meets it tangentially; clipping then shreds one arc into
    # slivers.  Rejoin pieces whose endpoints are close and near the circle.
    def near_rim(p):
        return abs(math.hypot(p[0], p[1]) - 1.0) < 3.0 * cell

    gap = 2.0 * cell
    polys = [p for p in polys if len(p) > 1]
    merged = True
    while merged:
        merged = False
        for i in range(len(polys)):
            if merged:
                break
            for j in range(i + 1, len(polys)):
                A, B = polys[i], polys[j]
                pairs = [
                    (np.linalg.norm(A[-1] - B[0]), False, False),
                    (np.linalg.norm(A[-1] - B[-1]), False, True),
                    (np.linalg.norm(A[0] - B[0]), True, False),
                    (np.linalg.norm(A[0] - B[-1]), True, True),
                ]
                d, flip_a, flip_b = min(pairs, key=lambda x: x[0])
                ea = A[0] if flip_a else A[-1]
                eb = B[-1] if flip_b else B[0]
                if d < gap and near_rim(ea) and near_rim(eb):
                    a = A[::-1] if flip_a else A
                    bpl = B[::-1] if flip_b else B
                    polys[i] = np.vstack([a, bpl])
                    del polys[j]
                    merged = True
                    break
    return polys


def _min_dist_to_segments(X, P, Q):
    # distances from points X (k,2) to the nearest of the segments P->Q (m,2)
    D = Q - P
    L2 = np.einsum("ij,ij->i", D, D)
    L2[L2 == 0.0] = 1e-300
    best = np.full(len(X), np.inf)
    chunk = 512
    for s0 in range(0, len(X), chunk):
        xs = X[s0:s0 + chunk]
        t = ((xs[:, None, :] - P[None, :, :]) * D[None, :, :]).sum(-1) / L2[None, :]
        t = np.clip(t, 0.0, 1.0)
        proj = P[None, :, :] + t[:, :, None] * D[None, :, :]
        d2 = ((xs[:, None, :] - proj) ** 2).sum(-1)
        best[s0:s0 + chunk] = np.sqrt(d2.min(axis=1))
    return best


def _as_polyline_list(obj):
    if isinstance(obj, ContourSet):
        return obj.polylines
    if isinstance(obj, np.ndarray):
        return [obj]
    return list(obj)


def hausdorff_distance(A, B) -> float:
    """Symmetric Hausdorff distance between polyline sets.

    Vertices of each side are measured against the segments of the other, so
    the result is insensitive to vertex placement along matching curves.
    """
    pa = _as_polyline_list(A)
    pb = _as_polyline_list(B)
    Xa = np.vstack(pa)
    Xb = np.vstack(pb)
    Pa = np.vstack([p[:-1] for p in pa if len(p) > 1])
    Qa = np.vstack([p[1:] for p in pa if len(p) > 1])
    Pb = np.vstack([p[:-1] for p in pb if len(p) > 1])
    Qb = np.vstack([p[1:] for p in pb if len(p) > 1])
    d_ab = _min_dist_to_segments(Xa, Pb, Qb).max()
    d_ba = _min_dist_to_segments(Xb, Pa, Qa).max()
    return float(max(d_ab, d_ba))
