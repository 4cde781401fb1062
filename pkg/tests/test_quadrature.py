import math

import numpy as np
import pytest

from willmore.charts import IDENTITY, ZETA, chart_at
from willmore.errors import QuadratureNotConverged
from willmore.quadrature import (
    Cap,
    QuadratureSpec,
    adaptive_sphere_integral,
    annulus_nodes,
    cap_image_disk,
    circulation,
    far_field_nodes,
    integrate_pieces,
    sphere_cover,
)
from willmore.rational import INFINITY


def round_density(chart, u):
    """Area density of the unit round sphere in any Mobius chart."""
    N = chart.a * u + chart.b
    D = chart.c * u + chart.d
    det = chart.a * chart.d - chart.b * chart.c
    return 4.0 * abs(det) ** 2 / (np.abs(N) ** 2 + np.abs(D) ** 2) ** 2


class TestAnnulus:
    def test_polynomial_moments(self):
        nodes, w = annulus_nodes(0.5, 2.0, 16, 64, 2.0)
        # integral of |u|^2 over annulus = pi/2 (R^4 - r^4)
        got = np.dot(np.abs(nodes) ** 2, w)
        assert got == pytest.approx(math.pi / 2 * (2.0**4 - 0.5**4), rel=1e-12)

    def test_area(self):
        nodes, w = annulus_nodes(0.1, 1.0, 10, 32, 2.5)
        assert w.sum() == pytest.approx(math.pi * (1.0 - 0.01), rel=1e-12)

    def test_empty_when_degenerate(self):
        nodes, w = annulus_nodes(1.0, 1.0, 10, 32, 2.0)
        assert nodes.size == 0


class TestFarField:
    def test_no_disks_is_plain_disk(self):
        nodes, w = far_field_nodes(2.0, [], 12, 64)
        assert w.sum() == pytest.approx(math.pi * 4.0, rel=1e-12)

    def test_disk_subtraction(self):
        disks = [(0.9 + 0.3j, 0.4), (-1.1 - 0.2j, 0.3)]
        nodes, w = far_field_nodes(3.0, disks, 14, 96)
        area = math.pi * (9.0 - 0.4**2 - 0.3**2)
        assert w.sum() == pytest.approx(area, rel=1e-7)
        for c, r in disks:
            assert np.min(np.abs(nodes - c)) > r

    def test_origin_disk(self):
        disks = [(0.05 + 0.0j, 0.5)]
        nodes, w = far_field_nodes(2.0, disks, 14, 96)
        assert w.sum() == pytest.approx(math.pi * (4.0 - 0.25), rel=1e-10)
        assert np.min(np.abs(nodes - 0.05)) > 0.5


class TestSphereCover:
    @pytest.mark.parametrize("points", [
        [INFINITY],
        [0.0, INFINITY],
        [1.0, -1.0, -1j * math.sqrt(3.0), INFINITY],
        [0.5 + 0.5j, -1.2],
    ])
    def test_round_area(self, points):
        caps = []
        for p in points:
            ch = chart_at(p)
            sep = min(
                (abs(ch.from_sphere(q)) for q in points if q is not p),
                default=math.inf,
            )
            caps.append(Cap(p, ch, min(0.35, 0.3 * sep)))
        spec = QuadratureSpec()
        pieces = sphere_cover(caps, spec, level=1)
        total = integrate_pieces(pieces, round_density)
        assert total == pytest.approx(4 * math.pi, abs=5e-7)

    def test_excision_removes_mass(self):
        caps = [Cap(INFINITY, ZETA, 0.35)]
        spec = QuadratureSpec()
        full = integrate_pieces(sphere_cover(caps, spec, 1), round_density)
        cut = integrate_pieces(sphere_cover(caps, spec, 1, excisions={0: 0.1}), round_density)
        # removed geodesic cap of chart radius 0.1 around infinity
        removed = full - cut
        # round area of {|u| < 0.1} in the reciprocal chart
        nodes, w = annulus_nodes(1e-9, 0.1, 20, 64, 2.0)
        expect = np.dot(round_density(ZETA, nodes), w)
        assert removed == pytest.approx(expect, rel=1e-7)

    def test_cap_image_disk_matches_mobius_image(self):
        cap = Cap(0.7 + 0.2j, chart_at(0.7 + 0.2j), 0.25)
        c, r = cap_image_disk(cap)
        theta = np.linspace(0, 2 * math.pi, 17)
        pts = cap.chart.to_sphere(0.25 * np.exp(1j * theta))
        np.testing.assert_allclose(np.abs(pts - c), r, rtol=1e-12)


class TestAdaptive:
    def test_smooth_integrand_converges(self):
        caps = [Cap(INFINITY, ZETA, 0.35)]
        spec = QuadratureSpec()
        val, err = adaptive_sphere_integral(caps, round_density, spec)
        assert val == pytest.approx(4 * math.pi, abs=1e-6)

    def test_rough_integrand_raises(self):
        caps = [Cap(INFINITY, ZETA, 0.35)]
        spec = QuadratureSpec(max_refine=1, rtol=1e-14, atol=1e-16)

        def jumpy(chart, u):
            return np.where(u.real > 0.123, 1.0, 0.0) * round_density(chart, u)

        with pytest.raises(QuadratureNotConverged):
            adaptive_sphere_integral(caps, jumpy, spec)


class TestCirculation:
    def test_exact_form_zero(self):
        # d(x1 x2): circulation of x2 dx1 + x1 dx2 vanishes on closed loops
        def one_form(chart, nodes):
            return nodes.imag, nodes.real

        assert circulation(one_form, IDENTITY, 1.7) == pytest.approx(0.0, abs=1e-12)

    def test_area_form(self):
        # (x1 dx2 - x2 dx1)/2 integrates to the enclosed area
        def one_form(chart, nodes):
            return -0.5 * nodes.imag, 0.5 * nodes.real

        r = 1.3
        assert circulation(one_form, IDENTITY, r) == pytest.approx(math.pi * r * r, rel=1e-12)
        assert circulation(one_form, IDENTITY, r, clockwise=True) == pytest.approx(
            -math.pi * r * r, rel=1e-12
        )
