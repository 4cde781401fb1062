"""Mobius charts of the Riemann sphere.

A chart is a Mobius map u -> z = (a u + b)/(c u + d) from chart coordinates
into the reference coordinate z.  Rational data composed into a chart stays
rational, so jets in any chart are exact.  The chart centered at a point p is
the rotation (u + p)/(1 - conj(p) u) of the round sphere, whose coordinate
disks around u = 0 are honest geodesic disks around p; the chart at infinity
is u -> 1/u.
"""
from __future__ import annotations

import numpy as np

from .jets import MAX_ORDER, Jet
from .rational import INFINITY, RationalFunction, is_infinity


class Chart:
    __slots__ = ("a", "b", "c", "d", "_compose_cache", "_z_rational")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (complex(a), complex(b), complex(c), complex(d))
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-14:
            raise ValueError("degenerate Mobius matrix")
        self._compose_cache = {}
        self._z_rational = RationalFunction([self.b, self.a], [self.d, self.c], reduce=False)

    def key(self):
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"Chart(z = ({self.a}u + {self.b})/({self.c}u + {self.d}))"

    # --- point maps ------------------------------------------------------
    def to_sphere(self, u):
        """Chart coordinate -> reference z coordinate (may be infinity)."""
        if np.isscalar(u) and is_infinity(u):
            return self.a / self.c if self.c != 0 else INFINITY
        return self._z_rational(u)

    def from_sphere(self, z):
        """Reference z coordinate -> chart coordinate."""
        if np.isscalar(z) and is_infinity(z):
            return -self.d / self.c if self.c != 0 else INFINITY
        z = np.asarray(z, dtype=complex)
        num = self.d * z - self.b
        den = -self.c * z + self.a
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, np.inf, num / np.where(den == 0, 1, den))
        return out if out.shape else complex(out)

    def compose(self, rf: RationalFunction) -> RationalFunction:
        """rf(z(u)) as a rational function of the chart coordinate."""
        got = self._compose_cache.get(rf)
        if got is None:
            got = rf.compose_mobius(self.a, self.b, self.c, self.d)
            self._compose_cache[rf] = got
        return got

    def rational_jet(self, rf: RationalFunction, u, order=MAX_ORDER) -> Jet:
        """Exact jet of u -> rf(z(u)) at the chart points u."""
        g = self.compose(rf)
        return Jet.from_holomorphic(g.derivatives_at(u, order), order)

    def coordinate_jets(self, u, order=MAX_ORDER):
        """Jets of the real chart coordinates (u1, u2) themselves."""
        u = np.asarray(u, dtype=complex)
        return Jet.coordinate(u.real, 0, order), Jet.coordinate(u.imag, 1, order)

    def z_jet(self, u, order=MAX_ORDER) -> Jet:
        """Complex jet of u -> z(u)."""
        return self.rational_jet(RationalFunction([0.0, 1.0]), u, order)


IDENTITY = Chart(1.0, 0.0, 0.0, 1.0)
ZETA = Chart(0.0, 1.0, 1.0, 0.0)  # z = 1/u


def chart_at(p) -> Chart:
    """Geodesic chart of the round sphere centered at the point p."""
    if is_infinity(p):
        return ZETA
    p = complex(p)
    if p == 0:
        return IDENTITY
    return Chart(1.0, p, -p.conjugate(), 1.0)


def sphere_coordinate_jets(chart: Chart, u, order=MAX_ORDER):
    """Jets of the three ambient coordinates of the unit round sphere
    n(z) = (2 Re z, 2 Im z, |z|^2 - 1)/(1 + |z|^2) pulled into the chart.

    Written through the homogeneous pair (N, D) = (a u + b, c u + d) of the
    chart map, n = (2 Re(N conj D), 2 Im(N conj D), |N|^2 - |D|^2)/(|N|^2 + |D|^2),
    which stays regular at points the chart sends to infinity.
    """
    u = np.asarray(u, dtype=complex)
    shape = u.shape
    Nj = Jet.from_holomorphic([chart.a * u + chart.b, np.full(shape, chart.a)], order)
    Dj = Jet.from_holomorphic([chart.c * u + chart.d, np.full(shape, chart.c)], order)
    P = Nj * Dj.conj()
    nn = (Nj * Nj.conj()).real()
    dd = (Dj * Dj.conj()).real()
    s = (nn + dd).reciprocal()
    n1 = P.real() * 2.0 * s
    n2 = P.imag() * 2.0 * s
    n3 = (nn - dd) * s
    return n1, n2, n3
