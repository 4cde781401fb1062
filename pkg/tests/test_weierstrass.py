import math

import numpy as np
import pytest

from willmore.errors import (
    LogarithmicObstruction,
    NonSimplePole,
    NullConditionViolated,
    ZeroResidueEnd,
)
from willmore.rational import RationalFunction, is_infinity
from willmore.weierstrass import (
    build_from_f,
    build_from_gauss_data,
    plane_immersion,
    quantization_report,
    residue_norm,
    residue_norm_limit,
)


def z_times(c):
    return RationalFunction([0.0, c])


class TestBuildFromF:
    def test_plane(self, plane):
        assert plane.m == 1
        assert is_infinity(plane.ends[0].location)
        assert plane.null_residual() < 1e-10

    def test_null_violation(self):
        with pytest.raises(NullConditionViolated):
            build_from_f([z_times(1.0), z_times(1.0), z_times(0.0)])

    def test_non_simple_pole(self):
        f = [RationalFunction([1.0], [0.0, 0.0, 1.0]), z_times(0.0), z_times(0.0)]
        with pytest.raises(NonSimplePole) as err:
            build_from_f(f)
        assert err.value.location == pytest.approx(0.0)

    def test_no_poles_rejected(self):
        with pytest.raises(ZeroResidueEnd):
            build_from_f([RationalFunction([1.0]), RationalFunction([1.0j]), RationalFunction([0.0])])


class TestEndData:
    def test_plane_residue_vector(self, plane):
        end = plane.ends[0]
        np.testing.assert_allclose(end.residue_vector, [1.0, -1.0j, 0.0], atol=1e-12)
        assert end.residue_norm == pytest.approx(2.0, abs=1e-12)
        assert end.alpha == pytest.approx(1.0, abs=1e-12)
        assert end.planar and end.embedded
        assert abs(end.asymptotic_normal[2]) == pytest.approx(1.0, abs=1e-9)

    def test_null_relation_in_rotated_frame(self, four_end):
        # with the asymptotic normal rotated to e3, the residue vector is
        # (a1, a2, 0) with a1^2 + a2^2 = 0 and |a1| = |a2|
        for end in four_end.ends:
            n = end.asymptotic_normal
            a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
            r1 = a - np.dot(a, n) * n
            r1 /= np.linalg.norm(r1)
            r2 = np.cross(n, r1)
            R = np.stack([r1, r2, n])
            rot = R @ end.residue_vector
            assert abs(rot[2]) < 1e-8 * np.linalg.norm(rot)
            assert abs(rot[0] ** 2 + rot[1] ** 2) < 1e-8 * end.residue_norm
            assert abs(rot[0]) == pytest.approx(abs(rot[1]), rel=1e-8)
            assert end.residue_norm == pytest.approx(2 * abs(rot[0]) ** 2, rel=1e-8)

    def test_residue_theorem_over_ends(self, plane, four_end):
        for imm in (plane, four_end):
            total = sum(e.dz_residue for e in imm.ends)
            assert np.max(np.abs(total)) < 1e-9

    def test_limit_cross_check(self, plane, four_end):
        # residue_norm equals 2 lim |u|^2 |X(u)|^2 along the end chart
        for imm in (plane, four_end):
            for end in imm.ends:
                lim = residue_norm_limit(imm, end)
                assert residue_norm(end) == pytest.approx(lim, rel=1e-4)


class TestResidueLaw:
    def test_base_scale_rotation(self):
        base = plane_immersion()
        assert base.ends[0].residue_norm == pytest.approx(2.0, abs=1e-10)

        c = 1.7 - 0.4j
        scaled = plane_immersion(scale=c)
        assert scaled.ends[0].residue_norm == pytest.approx(2.0 * abs(c) ** 2, abs=1e-10)

        th = 0.83
        R = np.array(
            [
                [math.cos(th), -math.sin(th), 0.0],
                [math.sin(th), math.cos(th), 0.0],
                [0.0, 0.0, 1.0],
            ]
        )
        rotated = plane_immersion(rotation=R)
        assert rotated.ends[0].residue_norm == pytest.approx(2.0, abs=1e-10)


class TestGaussData:
    def test_plane_from_gauss_data(self):
        imm = build_from_gauss_data(RationalFunction([0.0]), RationalFunction([1.0]))
        assert imm.m == 1
        assert is_infinity(imm.ends[0].location)
        assert imm.null_residual() < 1e-12

    def test_catenoid_rejected(self):
        with pytest.raises(LogarithmicObstruction) as err:
            build_from_gauss_data(z_times(1.0), RationalFunction([1.0], [0.0, 0.0, 1.0]))
        assert err.value.pole == pytest.approx(0.0)
        assert err.value.residue == pytest.approx(1.0)

    def test_enneper_rejected(self):
        with pytest.raises(NonSimplePole) as err:
            build_from_gauss_data(z_times(1.0), RationalFunction([1.0]))
        assert is_infinity(err.value.location)

    def test_phi_reproduced(self, rng):
        g = RationalFunction([0.3])
        eta = RationalFunction([1.0])
        imm = build_from_gauss_data(g, eta)
        one = RationalFunction([1.0])
        expect = [
            (one - g * g) * eta * 0.5,
            (one + g * g) * eta * 0.5j,
            g * eta,
        ]
        z = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        for built, ref in zip(imm.phi, expect):
            np.testing.assert_allclose(built(z), ref(z), rtol=1e-10, atol=1e-12)


class TestFourEnd:
    def test_structure(self, four_end):
        assert four_end.m == 4
        assert four_end.null_residual() < 1e-10
        assert all(e.planar for e in four_end.ends)
        assert all(e.embedded for e in four_end.ends)
        assert all(e.residue_norm > 0.1 for e in four_end.ends)

    def test_balanced_residues(self, four_end):
        norms = [e.residue_norm for e in four_end.ends]
        assert max(norms) / min(norms) == pytest.approx(1.0, rel=1e-6)

    def test_immersed_everywhere(self, four_end, rng):
        z = rng.uniform(-6, 6, 4000) + 1j * rng.uniform(-6, 6, 4000)
        for p in four_end.end_points():
            if not is_infinity(p):
                z = z[np.abs(z - p) > 0.05]
        fr = four_end.frame_at(z)
        assert fr.E.value.min() > 1e-3


class TestQuantization:
    def test_plane(self, plane):
        rep = quantization_report(plane)
        assert rep["m"] == 1
        assert rep["total_curvature"] == pytest.approx(0.0, abs=1e-9)
        assert rep["willmore_of_inversion"] == pytest.approx(4 * math.pi, abs=1e-9)

    def test_four_end(self, four_end):
        rep = quantization_report(four_end)
        assert rep["total_curvature"] == pytest.approx(12 * math.pi, rel=1e-6)
        assert rep["willmore_of_inversion"] == pytest.approx(16 * math.pi, rel=1e-6)
        assert rep["multiple_of_2pi_defect"] < 1e-7

    def test_total_curvature_is_2pi_multiple(self, plane, four_end):
        for imm in (plane, four_end):
            rep = quantization_report(imm)
            ratio = rep["total_curvature"] / (2 * math.pi)
            assert abs(ratio - round(ratio)) < 1e-6
