"""Portrait rendering determinism and serialization formats."""
import math

import numpy as np
import pytest

from rlws import contour_oracle, critical_data, validate_normalize
from rlws.formats import csv_text, fmt9, fmt17, json_text, obj_text
from rlws.portrait import default_levels, render_portrait


def _point_in_polygon(poly, x, y):
    # ray casting
    inside = False
    n = len(poly)
    for i in range(n - 1):
        x1, y1 = poly[i]
        x2, y2 = poly[i + 1]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) / (y2 - y1) * (x2 - x1)
            if xc > x:
                inside = not inside
    return inside


class TestPortrait:
    def test_byte_identical_rerender(self, co1m11):
        levels = default_levels(co1m11)
        svg1, rows1 = render_portrait(co1m11, levels, grid_n=128)
        svg2, rows2 = render_portrait(co1m11, levels, grid_n=128)
        assert svg1 == svg2
        assert rows1 == rows2

    def test_valid_svg_smoke(self, co313):
        svg, rows = render_portrait(co313, [1.0], grid_n=16)
        assert svg.startswith('<?xml version="1.0"')
        assert svg.count("<polyline") >= 1
        assert "</svg>" in svg
        assert len(rows) > 0

    @pytest.mark.parametrize("abc", [(1, -1, 1), (1, -2, 1), (1, 1, 0), (3, 1, 3)])
    def test_qualitative_regimes(self, abc):
        # a complete-range level produces a closed curve encircling the
        # critical point; a low level touches the domain boundary
        co = validate_normalize(*abc)
        cd = critical_data(co)
        mid = 0.5 * (max(0.0, 0.5 * (co.b + co.c)) + cd.alpha0)
        cs = contour_oracle(co, mid, 256)
        assert len(cs.polylines) >= 1
        closed = [p for p in cs.polylines
                  if np.hypot(*(p[0] - p[-1])) < 3 * cs.cell_size]
        assert closed
        p0 = cd.active_point
        assert any(_point_in_polygon(poly, p0.u, p0.v) for poly in closed)

        lo = cd.alpha_min + 0.25 * (min(0.0, 0.5 * co.b) + max(0.0, 0.5 * co.b)
                                    - cd.alpha_min)
        low_level = cd.alpha_min + 0.3 * (cd.alpha0 - cd.alpha_min) * 0.5
        cs_low = contour_oracle(co, low_level, 256)
        near_boundary = 0
        for poly in cs_low.polylines:
            for end in (poly[0], poly[-1]):
                on_axis = end[0] < 3 * cs_low.cell_size
                on_rim = abs(np.hypot(*end) - 1.0) < 3 * cs_low.cell_size
                if on_axis or on_rim:
                    near_boundary += 1
        assert near_boundary >= 2

    def test_singular_locus_rendered_only_for_positive_b(self, co110, co1m11):
        svg_pos, _ = render_portrait(co110, [0.55], grid_n=64)
        svg_neg, _ = render_portrait(co1m11, [0.1], grid_n=64)
        assert 'stroke-dasharray="2,3"' in svg_pos
        assert 'stroke-dasharray="2,3"' not in svg_neg


class TestFormats:
    def test_fmt17_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            x = float(rng.uniform(-10, 10)) * 10.0 ** int(rng.integers(-300, 300))
            assert float(fmt17(x)) == x

    def test_fmt9_digits(self):
        assert fmt9(math.sqrt(0.9)) == "0.948683298"

    def test_csv_rfc4180_line_endings(self):
        text = csv_text(("a", "b"), [(1, 2), (3, 4)])
        assert text == "a,b\r\n1,2\r\n3,4\r\n"

    def test_obj_quads_become_triangles(self):
        verts = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]
        text = obj_text(verts, [(0, 1, 2, 3)], comments=("t",))
        lines = text.splitlines()
        assert lines[0] == "# t"
        assert sum(1 for ln in lines if ln.startswith("v ")) == 4
        faces = [ln for ln in lines if ln.startswith("f ")]
        assert faces == ["f 1 2 3", "f 1 3 4"]

    def test_json_trailing_newline(self):
        assert json_text({"x": 1.5}).endswith("}\n")
