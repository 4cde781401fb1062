import numpy as np
import pytest

from willmore.charts import IDENTITY, ZETA, chart_at, sphere_coordinate_jets
from willmore.jets import laplacian_value
from willmore.rational import INFINITY, RationalFunction


def sample_points(rng, n=12):
    return rng.standard_normal(n) * 1.2 + 1j * rng.standard_normal(n) * 1.2


def test_holomorphic_seed_matches_cauchy_riemann(rng):
    f = RationalFunction([1.0, 0.0, 1.0], [1.0, 1.0])
    z = sample_points(rng)
    j = IDENTITY.rational_jet(f, z, 4)
    fp = f.derivative()(z)
    # d/dx1 = d/dz and d/dx2 = i d/dz on holomorphic functions
    np.testing.assert_allclose(j.deriv_value(1, 0), fp, rtol=1e-12)
    np.testing.assert_allclose(j.deriv_value(0, 1), 1j * fp, rtol=1e-12)


def test_product_and_reciprocal(rng):
    f = RationalFunction([0.3, 1.0], [1.0, 0.5])
    z = sample_points(rng)
    j = IDENTITY.rational_jet(f, z, 4)
    r = (j * j).reciprocal() * (j * j)
    np.testing.assert_allclose(r.value, 1.0, rtol=1e-12)
    for i, k in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1)]:
        np.testing.assert_allclose(r.deriv_value(i, k), 0.0, atol=1e-10)


def test_sqrt_log_consistency(rng):
    f = RationalFunction([2.0, 0.0, 1.0])  # z^2 + 2, kept away from zero
    z = sample_points(rng) * 0.4
    j = IDENTITY.rational_jet(f, z, 4).real()
    s = j.sqrt()
    np.testing.assert_allclose((s * s).value, j.value, rtol=1e-12)
    lg = j.log()
    # d1 log f = d1 f / f
    np.testing.assert_allclose(
        lg.deriv_value(1, 0), j.deriv_value(1, 0) / j.value, rtol=1e-11
    )


def test_jets_match_finite_differences(rng):
    f = RationalFunction([1.0, -0.7, 0.25], [2.0, 0.0, 1.0])
    z0 = 0.37 + 0.21j
    j = IDENTITY.rational_jet(f, np.array([z0]), 4).real()
    h = 1e-4

    def F(x, y):
        return f(complex(x, y)).real

    x0, y0 = z0.real, z0.imag
    fd_x = (F(x0 + h, y0) - F(x0 - h, y0)) / (2 * h)
    fd_yy = (F(x0, y0 + h) - 2 * F(x0, y0) + F(x0, y0 - h)) / h**2
    fd_xy = (
        F(x0 + h, y0 + h) - F(x0 + h, y0 - h) - F(x0 - h, y0 + h) + F(x0 - h, y0 - h)
    ) / (4 * h * h)
    assert j.deriv_value(1, 0)[0] == pytest.approx(fd_x, rel=1e-7)
    assert j.deriv_value(0, 2)[0] == pytest.approx(fd_yy, rel=1e-6)
    assert j.deriv_value(1, 1)[0] == pytest.approx(fd_xy, rel=1e-6)


def test_derivative_extraction_lowers_order(rng):
    f = RationalFunction([0.0, 0.0, 1.0])
    z = sample_points(rng, 5)
    j = IDENTITY.rational_jet(f, z, 4)
    d1 = j.deriv(0)
    assert d1.order == 3
    np.testing.assert_allclose(d1.value, 2 * z, rtol=1e-14)


def test_laplacian_of_harmonic_is_zero(rng):
    # Re(z^3) is harmonic
    f = RationalFunction([0.0, 0.0, 0.0, 1.0])
    z = sample_points(rng)
    j = IDENTITY.rational_jet(f, z, 4).real()
    np.testing.assert_allclose(laplacian_value(j), 0.0, atol=1e-10)


def test_power_matches_repeated_product(rng):
    f = RationalFunction([0.5, 1.0], [1.0, 0.0, 0.3])
    z = sample_points(rng, 6)
    j = IDENTITY.rational_jet(f, z, 4)
    np.testing.assert_allclose((j**3).c, (j * j * j).c, rtol=1e-12, atol=1e-12)


class TestCharts:
    def test_round_trip(self, rng):
        ch = chart_at(0.7 - 0.4j)
        z = sample_points(rng)
        np.testing.assert_allclose(ch.to_sphere(ch.from_sphere(z)), z, rtol=1e-12)

    def test_chart_at_infinity_is_reciprocal(self):
        ch = chart_at(INFINITY)
        assert ch.to_sphere(0.5) == pytest.approx(2.0)

    def test_geodesic_chart_centers(self):
        p = 0.3 + 1.1j
        ch = chart_at(p)
        assert ch.to_sphere(0.0) == pytest.approx(p)

    def test_sphere_coordinates_unit_norm(self, rng):
        for ch in (IDENTITY, ZETA, chart_at(1.0), chart_at(-1j * np.sqrt(3.0))):
            u = sample_points(rng)
            n1, n2, n3 = sphere_coordinate_jets(ch, u, 2)
            norm = n1.value**2 + n2.value**2 + n3.value**2
            np.testing.assert_allclose(norm, 1.0, rtol=1e-12)

    def test_sphere_coordinates_regular_at_infinity(self):
        # the zeta chart maps u = 0 to infinity; n must come out as the pole
        n1, n2, n3 = sphere_coordinate_jets(ZETA, np.array([0.0 + 0.0j]), 2)
        assert n1.value[0] == pytest.approx(0.0)
        assert n2.value[0] == pytest.approx(0.0)
        assert n3.value[0] == pytest.approx(1.0)

    def test_rational_jet_chart_covariance(self, rng):
        # scalar K-like quantities built from jets agree across charts
        f = RationalFunction([1.0, 0.0, 0.5], [1.0, -0.3])
        ch = chart_at(0.5 + 0.2j)
        z = 0.9 + 0.4j
        u = ch.from_sphere(z)
        jd = ch.rational_jet(f, np.array([u]), 3)
        jz = IDENTITY.rational_jet(f, np.array([z]), 3)
        zp = ch.compose(RationalFunction([0.0, 1.0])).derivatives_at(np.array([u]), 1)[1]
        # first chart derivative transforms with the chain rule
        np.testing.assert_allclose(
            jd.deriv_value(1, 0), jz.deriv_value(1, 0) * zp, rtol=1e-12
        )
