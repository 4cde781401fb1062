import math

import numpy as np
import pytest

from willmore.charts import Chart, sphere_coordinate_jets
from willmore.fields import SpherePolynomial
from willmore.geometry import ParametricSurface, laplace_beltrami
from willmore.jets import MAX_ORDER
from willmore.s3 import (
    EigenLine,
    clifford_index_bruteforce,
    clifford_torus,
    great_sphere,
    index_from_lines,
    jacobi_spectrum,
    spectrum_report,
    willmore_index_s3,
)


class TestGreatSphere:
    def test_spectrum_head(self):
        lines = jacobi_spectrum(great_sphere(), 3)
        assert [(l.lam, l.multiplicity) for l in lines] == [
            (2.0, 1),
            (0.0, 3),
            (-4.0, 5),
            (-10.0, 7),
        ]

    def test_single_positive_eigenvalue_up_to_cutoff(self):
        lines = jacobi_spectrum(great_sphere(), 12)
        positive = [l for l in lines if l.lam > 0]
        assert positive == [EigenLine(2.0, 1)]

    def test_index_zero(self):
        assert willmore_index_s3(great_sphere()) == 0


class TestCliffordTorus:
    def test_index_zero(self):
        assert willmore_index_s3(clifford_torus()) == 0

    def test_bruteforce_oracle(self):
        assert clifford_index_bruteforce() == willmore_index_s3(clifford_torus())

    def test_energy_checksum(self):
        t = clifford_torus()
        assert t.area == pytest.approx(2 * math.pi**2)
        assert t.willmore_energy_s3 == pytest.approx(2 * math.pi**2)
        assert t.total_curvature == 0.0  # flat metric

    def test_boundary_eigenvalues_present_but_not_counted(self):
        lines = jacobi_spectrum(clifford_torus(), 4)
        lams = {l.lam: l.multiplicity for l in lines}
        assert lams[2.0] == 4   # k^2 + l^2 = 1 modes sit exactly on the edge
        assert lams[0.0] == 4   # k^2 + l^2 = 2 modes on the other edge
        assert willmore_index_s3(clifford_torus()) == 0


class TestIndexCounting:
    def test_injected_line(self):
        assert index_from_lines([EigenLine(1.0, 3)]) == 3

    def test_strict_boundaries(self):
        lines = [EigenLine(0.0, 5), EigenLine(2.0, 7), EigenLine(1.0, 2)]
        assert index_from_lines(lines) == 2

    def test_cutoff_robustness(self):
        base = jacobi_spectrum(great_sphere(), 4)
        extended = base + [EigenLine(-40.0, 9), EigenLine(-24.0, 11)]
        assert index_from_lines(base) == index_from_lines(extended)


class RoundSphere(ParametricSurface):
    """Unit round sphere through the stereographic chart."""

    def chart_jets(self, chart, u, order=MAX_ORDER):
        return list(sphere_coordinate_jets(chart, u, order))

    def caps(self):
        return []


class TestJacobiActionNumeric:
    def test_coordinate_functions_in_kernel(self, rng):
        # L = Delta + 2 on the great sphere: ambient coordinates satisfy
        # Delta n_i = -2 n_i, so (Delta + 2) n_i = 0
        sphere = RoundSphere()
        z = rng.standard_normal(40) * 1.1 + 1j * rng.standard_normal(40) * 1.1
        for i in range(3):
            key = tuple(1 if j == i else 0 for j in range(3))
            field = SpherePolynomial({key: 1.0})
            lap = laplace_beltrami(field, sphere, z)
            vals = field.chart_jet(Chart(1, 0, 0, 1), z, 0).value
            resid = lap + 2.0 * vals
            assert np.max(np.abs(resid)) < 1e-8

    def test_normal_direction_eigenvalue_two(self, rng):
        # the unit normal of the equator in the three-sphere is constant, so
        # a . n is a constant function and L(a . n) = 2 (a . n)
        sphere = RoundSphere()
        z = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        from willmore.fields import ConstantField

        c = ConstantField(0.73)
        lap = laplace_beltrami(c, sphere, z)
        out = lap + 2.0 * 0.73
        assert np.max(np.abs(out - 2.0 * 0.73)) < 1e-10


def test_spectrum_report_shape():
    rep = spectrum_report(great_sphere(), 4)
    assert rep["willmore_index"] == 0
    assert rep["spectrum"][0] == {"lambda": 2.0, "multiplicity": 1}
    assert rep["area"] == pytest.approx(4 * math.pi)
