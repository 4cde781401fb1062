"""Scalar fields on the sphere with exact chart jets.

The variation fields are restrictions of real polynomials in the three
ambient coordinates of the round sphere; they are smooth everywhere
(including at infinity) and their jets in any Mobius chart come out of plain
jet arithmetic, with no numerical differentiation.
"""
from __future__ import annotations

import numpy as np

from .charts import Chart, chart_at, sphere_coordinate_jets
from .jets import MAX_ORDER, Jet

class ScalarField:
    """Interface: jets in a chart, plus pointwise evaluation on the sphere.

    `coords` optionally carries precomputed sphere-coordinate jets for the
    same (chart, u), so batch evaluations of many fields share them.
    """

    def chart_jet(self, chart: Chart, u, order=MAX_ORDER, coords=None) -> Jet:
        raise NotImplementedError

    def __call__(self, point):
        """Value at a sphere point given in the reference coordinate."""
        ch = chart_at(point)
        u = np.zeros(1, dtype=complex)
        return float(self.chart_jet(ch, u, order=0).value[0])

    def __add__(self, other):
        return _Combination([(1.0, self), (1.0, _as_field(other))])

    def __sub__(self, other):
        return _Combination([(1.0, self), (-1.0, _as_field(other))])

    def __mul__(self, scalar):
        return _Combination([(float(scalar), self)])

    __rmul__ = __mul__


def _as_field(f):
    if isinstance(f, ScalarField):
        return f
    return ConstantField(float(f))


class ConstantField(ScalarField):
    def __init__(self, value):
        self.value = float(value)

    def chart_jet(self, chart, u, order=MAX_ORDER, coords=None):
        u = np.asarray(u)
        return Jet.constant(np.full(u.shape, self.value), u.shape, order)

    def __repr__(self):
        return f"ConstantField({self.value})"


class SpherePolynomial(ScalarField):
    """Real polynomial in the ambient coordinates (n1, n2, n3) of the unit
    round sphere, restricted to the sphere.

    Monomials are a dict {(a, b, c): coefficient} meaning n1^a n2^b n3^c.
    """

    def __init__(self, monomials):
        self.monomials = {tuple(k): float(v) for k, v in monomials.items() if v != 0.0}
        if not self.monomials:
            self.monomials = {(0, 0, 0): 0.0}

    @property
    def degree(self):
        return max(sum(k) for k in self.monomials)

    def chart_jet(self, chart, u, order=MAX_ORDER, coords=None):
        n = coords if coords is not None else sphere_coordinate_jets(chart, u, order)
        u = np.asarray(u)
        out = Jet.constant(np.zeros(u.shape), u.shape, order)
        for (a, b, c), coef in self.monomials.items():
            term = Jet.constant(np.full(u.shape, coef), u.shape, order)
            for idx, e in ((0, a), (1, b), (2, c)):
                if e:
                    term = term * n[idx] ** e
            out = out + term
        return out

    def rotated(self, R):
        """Field n -> P(R n) for a 3x3 orthogonal matrix R."""
        R = np.asarray(R, dtype=float)
        out = {}
        for (a, b, c), coef in self.monomials.items():
            expanded = {(0, 0, 0): coef}
            for idx, e in ((0, a), (1, b), (2, c)):
                for _ in range(e):
                    nxt = {}
                    for mono, cf in expanded.items():
                        for j in range(3):
                            r = R[idx, j]
                            if r == 0.0:
                                continue
                            key = tuple(mono[i] + (1 if i == j else 0) for i in range(3))
                            nxt[key] = nxt.get(key, 0.0) + cf * r
                    expanded = nxt
            for mono, cf in expanded.items():
                out[mono] = out.get(mono, 0.0) + cf
        return SpherePolynomial(out)

    def __repr__(self):
        return f"SpherePolynomial({self.monomials})"


class _Combination(ScalarField):
    def __init__(self, terms):
        flat = []
        for w, f in terms:
            if isinstance(f, _Combination):
                flat.extend((w * w2, f2) for w2, f2 in f.terms)
            else:
                flat.append((w, f))
        self.terms = flat

    def chart_jet(self, chart, u, order=MAX_ORDER, coords=None):
        out = None
        for w, f in self.terms:
            j = f.chart_jet(chart, u, order, coords) * w
            out = j if out is None else out + j
        return out


class ChartFunctionField(ScalarField):
    """Field defined by a jet-arithmetic builder on the reference chart
    coordinates; used for diagnostics and tests.

    builder(x_jet, y_jet) -> Jet, where (x, y) are the real and imaginary
    parts of the reference coordinate z.  Only valid away from infinity.
    """

    def __init__(self, builder):
        self.builder = builder

    def chart_jet(self, chart, u, order=MAX_ORDER, coords=None):
        zj = chart.z_jet(u, order)
        return self.builder(zj.real(), zj.imag())


def sphere_poly_basis(max_degree: int):
    """Basis for the polynomial functions of degree <= max_degree on the
    sphere: monomials n1^a n2^b n3^c with c <= 1 (higher powers of n3 reduce
    through n1^2 + n2^2 + n3^2 = 1).  There are (max_degree + 1)^2 of them,
    ordered by total degree, so bases for increasing degree are nested.
    """
    basis = []
    for l in range(max_degree + 1):
        for c in (0, 1):
            if c > l:
                continue
            for a in range(l - c, -1, -1):
                b = l - c - a
                basis.append(SpherePolynomial({(a, b, c): 1.0}))
    return basis
