"""Differential geometry of parametric surfaces over sphere charts.

All pointwise quantities come from exact jets: surfaces expose their three
components as chart jets, and frames, curvatures and the fourth-order Willmore
residual are assembled by jet arithmetic.  Integral quantities go through the
sphere quadrature with refinement caps around the punctures.
"""
from __future__ import annotations

import numpy as np

from .charts import Chart, IDENTITY
from .errors import DegenerateMetric, OriginOnSurface
from .fields import ScalarField
from .jets import MAX_ORDER, Jet, cross, dot
from .quadrature import QuadratureSpec, adaptive_sphere_integral
from .rational import is_infinity


class ParametricSurface:
    """Interface: three real component jets in a chart."""

    def chart_jets(self, chart: Chart, u, order=MAX_ORDER):
        raise NotImplementedError

    def caps(self):
        """Refinement caps for quadrature (marked points of the domain)."""
        raise NotImplementedError


class Frame:
    """First/second fundamental data of a surface at a batch of points.

    Jets are kept so that derived scalars (mean curvature, its Laplacian)
    remain differentiable to the leftover order.
    """

    __slots__ = ("position", "e1", "e2", "E", "F", "G", "normal", "det",
                 "II11", "II12", "II22", "H", "K")

    def __init__(self, X, guard=1e-14):
        self.position = X
        e1 = [c.deriv(0) for c in X]
        e2 = [c.deriv(1) for c in X]
        self.e1, self.e2 = e1, e2
        E = dot(e1, e1)
        F = dot(e1, e2)
        G = dot(e2, e2)
        self.E, self.F, self.G = E, F, G
        det = E * G - F * F
        self.det = det
        scale = (E.value + G.value)
        if np.any(det.value < guard * scale * scale):
            raise DegenerateMetric("metric determinant below guard threshold")
        nvec = cross(e1, e2)
        nn = dot(nvec, nvec).sqrt().reciprocal()
        self.normal = [c * nn for c in nvec]
        X11 = [c.deriv(0) for c in e1]
        X12 = [c.deriv(1) for c in e1]
        X22 = [c.deriv(1) for c in e2]
        self.II11 = dot(X11, self.normal)
        self.II12 = dot(X12, self.normal)
        self.II22 = dot(X22, self.normal)
        inv_det = det.reciprocal()
        self.H = (self.II11 * G - self.II12 * F * 2.0 + self.II22 * E) * inv_det * 0.5
        self.K = (self.II11 * self.II22 - self.II12 * self.II12) * inv_det

    def conformal_factor(self):
        """e^{2 lambda} = E, meaningful when the parametrization is conformal."""
        return self.E

    def area_density(self):
        return self.det.sqrt()


def laplace_beltrami_jet(h: Jet, frame: Frame) -> Jet:
    """Laplace-Beltrami of a scalar jet for the frame's induced metric."""
    E, F, G, det = frame.E, frame.F, frame.G, frame.det
    sg = det.sqrt()
    inv_det = det.reciprocal()
    g11 = G * inv_det
    g12 = -1.0 * F * inv_det
    g22 = E * inv_det
    h1 = h.deriv(0)
    h2 = h.deriv(1)
    P = sg * (g11 * h1 + g12 * h2)
    Q = sg * (g12 * h1 + g22 * h2)
    return (P.deriv(0) + Q.deriv(1)) * sg.reciprocal()


class MinimalChartSurface(ParametricSurface):
    """Real part of a triple of rational functions, plus a translation."""

    def __init__(self, f, translation=(0.0, 0.0, 0.0), caps=None):
        self.f = tuple(f)
        self.translation = tuple(float(t) for t in translation)
        self._caps = caps or []

    def chart_jets(self, chart, u, order=MAX_ORDER):
        out = []
        for fj, tj in zip(self.f, self.translation):
            out.append(chart.rational_jet(fj, u, order).real() + tj)
        return out

    def caps(self):
        return self._caps


class InvertedSurface(ParametricSurface):
    """x -> x/|x|^2 applied to a base surface."""

    def __init__(self, base: ParametricSurface):
        self.base = base

    def chart_jets(self, chart, u, order=MAX_ORDER):
        X = self.base.chart_jets(chart, u, order)
        inv_norm2 = dot(X, X).reciprocal()
        return [c * inv_norm2 for c in X]

    def caps(self):
        return self.base.caps()


class NormalGraphSurface(ParametricSurface):
    """base + t * v * n(base) for a scalar field v."""

    def __init__(self, base: ParametricSurface, v: ScalarField, t: float):
        self.base = base
        self.v = v
        self.t = float(t)

    def chart_jets(self, chart, u, order=MAX_ORDER):
        X = self.base.chart_jets(chart, u, min(order + 1, MAX_ORDER))
        fr = Frame(X)
        vj = self.v.chart_jet(chart, u, order)
        return [x + n * vj * self.t for x, n in zip(X, fr.normal)]

    def caps(self):
        return self.base.caps()


class CompositeW(ScalarField):
    """w = |X|^2 * v for a surface X and a sphere field v; the variation of
    the inverted surface pulled back to the original one."""

    def __init__(self, surface: ParametricSurface, v: ScalarField):
        self.surface = surface
        self.v = v

    def chart_jet(self, chart, u, order=MAX_ORDER):
        X = self.surface.chart_jets(chart, u, order)
        return dot(X, X) * self.v.chart_jet(chart, u, order)


def composite_w(surface: ParametricSurface, v: ScalarField) -> CompositeW:
    return CompositeW(surface, v)


# --- pointwise operations ----------------------------------------------------

def frame_at(surface: ParametricSurface, z, order=2):
    """Frame of the surface at reference-coordinate points z (vectorized)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    X = surface.chart_jets(IDENTITY, z, order + 2)
    return Frame(X)


class SurfacePointFrame:
    """Plain-number frame data at a single point."""

    __slots__ = ("position", "e1", "e2", "normal", "conformal_factor",
                 "second_fundamental_form", "mean_curvature", "gauss_curvature")

    def __init__(self, frame: Frame, i=0):
        take = lambda jet: float(jet.value[i])
        self.position = np.array([take(c) for c in frame.position])
        self.e1 = np.array([take(c) for c in frame.e1])
        self.e2 = np.array([take(c) for c in frame.e2])
        self.normal = np.array([take(c) for c in frame.normal])
        self.conformal_factor = take(frame.E)
        self.second_fundamental_form = np.array(
            [[take(frame.II11), take(frame.II12)], [take(frame.II12), take(frame.II22)]]
        )
        self.mean_curvature = take(frame.H)
        self.gauss_curvature = take(frame.K)


def surface_point_frame(surface: ParametricSurface, z) -> SurfacePointFrame:
    return SurfacePointFrame(frame_at(surface, z, order=2))


def mean_curvature_of(surface: ParametricSurface, z):
    """Mean curvature from the first/second fundamental forms at z."""
    fr = frame_at(surface, z, order=2)
    H = fr.H.value
    return H if H.shape != (1,) else float(H[0])


def gauss_curvature_of(surface: ParametricSurface, z):
    fr = frame_at(surface, z, order=2)
    K = fr.K.value
    return K if K.shape != (1,) else float(K[0])


def willmore_residual(surface: ParametricSurface, z):
    """|Delta_g H + 2 H (H^2 - K)| at z; zero exactly on Willmore surfaces."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    X = surface.chart_jets(IDENTITY, z, MAX_ORDER)
    fr = Frame(X)
    lap_H = laplace_beltrami_jet(fr.H, fr).value
    H = fr.H.value
    K = fr.K.value
    out = np.abs(lap_H + 2.0 * H * (H * H - K))
    return out if out.shape != (1,) else float(out[0])


def laplace_beltrami(field: ScalarField, surface: ParametricSurface, z):
    """Laplace-Beltrami of the field in the surface's induced metric at z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    X = surface.chart_jets(IDENTITY, z, MAX_ORDER)
    fr = Frame(X)
    h = field.chart_jet(IDENTITY, z, MAX_ORDER)
    out = laplace_beltrami_jet(h, fr).value
    return out if out.shape != (1,) else float(out[0])


# --- integral operations -----------------------------------------------------

def willmore_energy(surface: ParametricSurface, spec: QuadratureSpec | None = None,
                    with_error=False):
    """Integral of H^2 over the surface (adaptive sphere quadrature)."""
    spec = spec or QuadratureSpec()

    def integrand(chart, u):
        X = surface.chart_jets(chart, u, 2)
        fr = Frame(X)
        return fr.H.value ** 2 * fr.area_density().value

    val, err = adaptive_sphere_integral(surface.caps(), integrand, spec)
    return (float(val), float(err)) if with_error else float(val)


def total_curvature(surface: ParametricSurface, spec: QuadratureSpec | None = None,
                    with_error=False):
    """Integral of -K over the surface; the density extends smoothly across
    planar-end punctures."""
    spec = spec or QuadratureSpec()

    def integrand(chart, u):
        X = surface.chart_jets(chart, u, 2)
        fr = Frame(X)
        return -fr.K.value * fr.area_density().value

    val, err = adaptive_sphere_integral(surface.caps(), integrand, spec)
    return (float(val), float(err)) if with_error else float(val)


def check_origin_clearance(surface: ParametricSurface, guard=1e-8):
    """Smallest |X| over a sampling of the sphere; raises when the surface
    comes too close to the inversion center."""
    best = np.inf
    for cap in surface.caps():
        u = np.geomspace(1e-3, cap.radius, 24)[None, :] * np.exp(
            1j * np.linspace(0, 2 * np.pi, 16, endpoint=False)
        )[:, None]
        X = surface.chart_jets(cap.chart, u.ravel(), 0)
        best = min(best, float(np.sqrt(sum(c.value ** 2 for c in X)).min()))
    grid = np.linspace(-3, 3, 41)
    zz = (grid[:, None] + 1j * grid[None, :]).ravel()
    finite_ends = [cap.point for cap in surface.caps() if not is_infinity(cap.point)]
    for p in finite_ends:
        zz = zz[np.abs(zz - p) > 5e-2]
    for chart_pts in (zz, 1.0 / zz[np.abs(zz) > 1e-3]):
        X = surface.chart_jets(IDENTITY, chart_pts, 0)
        best = min(best, float(np.sqrt(sum(c.value ** 2 for c in X)).min()))
    if best < guard:
        raise OriginOnSurface(f"surface approaches the origin: min |X| = {best:.3e}")
    return best


def invert(surface: ParametricSurface) -> InvertedSurface:
    """Inversion x -> x/|x|^2 of the surface; requires origin clearance."""
    check_origin_clearance(surface)
    return InvertedSurface(surface)


# --- boundary one-form -------------------------------------------------------

def boundary_one_form_values(imm_surface: ParametricSurface, w: ScalarField,
                             chart: Chart, u):
    """Chart components (A1, A2) of the flux one-form

        (Delta_g w + 2 K w) * (star dw) - (1/2) star d |dw|^2_g

    with star dx1 = dx2, star dx2 = -dx1 and |dw|^2_g = e^{-2 lambda}|dw|^2,
    for a conformally parametrized minimal surface.
    """
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    X = imm_surface.chart_jets(chart, u, MAX_ORDER)
    fr = Frame(X)
    wj = w.chart_jet(chart, u, MAX_ORDER)
    e2l = fr.E  # conformal factor
    inv_e2l = e2l.reciprocal()
    lap_g = laplace_beltrami_jet(wj, fr)
    w1 = wj.deriv(0)
    w2 = wj.deriv(1)
    grad2_g = (w1 * w1 + w2 * w2) * inv_e2l
    # star d|dw|_g^2 = d1(.) dx2 - d2(.) dx1
    s1 = grad2_g.deriv(0)
    s2 = grad2_g.deriv(1)
    front = lap_g + fr.K * wj * 2.0
    A1 = -1.0 * front * w2 + s2 * 0.5
    A2 = front * w1 - s1 * 0.5
    return A1, A2


def boundary_one_form(imm_surface: ParametricSurface, w: ScalarField, z):
    """Pointwise (A1, A2) of the flux one-form at reference coordinates z."""
    A1, A2 = boundary_one_form_values(imm_surface, w, IDENTITY, z)
    a1, a2 = A1.value, A2.value
    if a1.shape == (1,):
        return float(a1[0]), float(a2[0])
    return a1, a2


def one_form_exterior_derivative(imm_surface, w, chart, u):
    """d(A1 dx1 + A2 dx2) = (d1 A2 - d2 A1) dx1^dx2, pointwise values."""
    A1, A2 = boundary_one_form_values(imm_surface, w, chart, u)
    return A2.deriv(0).value - A1.deriv(1).value
