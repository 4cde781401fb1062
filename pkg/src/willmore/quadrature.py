"""Quadrature over the sphere with refinement around marked points.

The sphere is covered by: one polar cap per marked point (an annulus in that
point's geodesic chart, geometrically subdivided toward the point, optionally
starting at an excision radius), a far-field region in the reference chart
integrated in polar coordinates with rays clipped against the cap disks, and,
when no cap covers infinity, a disk piece in the reciprocal chart.  All rules
are tensor Gauss-Legendre in radius times trapezoid (or per-arc
Gauss-Legendre) in angle, which is spectrally accurate for the smooth
integrands that arise away from the punctures.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .charts import IDENTITY, ZETA, Chart
from .errors import QuadratureNotConverged
from .rational import is_infinity

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QuadratureSpec:
    """Resolution and convergence policy for all sphere integrals."""

    radial_nodes: int = 10          # Gauss-Legendre nodes per radial band
    angular_nodes: int = 48         # trapezoid nodes per full circle
    geometric_ratio: float = 2.5    # band ratio of the annular ladders
    inner_floor: float = 1e-5       # cap ladder stop when nothing is excised
    start_level: int = 0
    max_refine: int = 4
    rtol: float = 2e-8
    atol: float = 1e-11

    def at_level(self, level):
        f = 1.6 ** level
        return (
            max(4, int(round(self.radial_nodes * f))),
            max(16, int(round(self.angular_nodes * f))),
        )

    @staticmethod
    def from_dict(d):
        d = dict(d or {})
        allowed = {f.name for f in QuadratureSpec.__dataclass_fields__.values()}  # type: ignore
        bad = set(d) - set(allowed)
        if bad:
            raise ValueError(f"unknown quadrature keys: {sorted(bad)}")
        return QuadratureSpec(**d)


@dataclass(frozen=True)
class Cap:
    """Neighborhood of a marked sphere point, in that point's geodesic chart."""

    point: complex          # reference coordinate; may be INFINITY
    chart: Chart
    radius: float           # chart radius of the cap


@dataclass
class Piece:
    chart: Chart
    nodes: np.ndarray       # complex chart coordinates
    weights: np.ndarray     # Lebesgue chart measure weights


@lru_cache(maxsize=64)
def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gl_on(a, b, n):
    x, w = _gl(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def annulus_nodes(r_in, r_out, nr, nt, ratio, center=0.0):
    """Tensor rule on the annulus, geometrically banded from r_out down."""
    if r_in >= r_out:
        return np.zeros(0, complex), np.zeros(0)
    edges = [r_out]
    while edges[-1] / ratio > r_in * 1.0000001:
        edges.append(edges[-1] / ratio)
    edges.append(r_in)
    theta = TWO_PI * np.arange(nt) / nt
    wt = TWO_PI / nt
    eith = np.exp(1j * theta)
    all_nodes, all_w = [], []
    for hi, lo in zip(edges[:-1], edges[1:]):
        rho, wr = _gl_on(lo, hi, nr)
        nodes = center + rho[:, None] * eith[None, :]
        w = (rho * wr)[:, None] * np.full((1, nt), wt)
        all_nodes.append(nodes.ravel())
        all_w.append(w.ravel())
    return np.concatenate(all_nodes), np.concatenate(all_w)


def disk_nodes(r_out, nr, nt, ratio, floor, center=0.0):
    """Full disk via an annular ladder; the innermost disk of radius `floor`
    is dropped (its area is O(floor^2), below every tolerance in use)."""
    return annulus_nodes(floor, r_out, nr, nt, ratio, center)


def _circumcircle(a, b, c):
    d = 2.0 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    ux = (abs(a) ** 2 * (b.imag - c.imag) + abs(b) ** 2 * (c.imag - a.imag) + abs(c) ** 2 * (a.imag - b.imag)) / d
    uy = (abs(a) ** 2 * (c.real - b.real) + abs(b) ** 2 * (a.real - c.real) + abs(c) ** 2 * (b.real - a.real)) / d
    center = complex(ux, uy)
    return center, abs(a - center)


def cap_image_disk(cap: Cap):
    """Image of the cap boundary circle in the reference chart, as
    (center, radius); None when the cap surrounds infinity."""
    if is_infinity(cap.point):
        return None
    pts = [cap.chart.to_sphere(cap.radius * np.exp(1j * t)) for t in (0.1, 2.2, 4.3)]
    return _circumcircle(*[complex(p) for p in pts])


def far_field_nodes(r_big, disks, nr, nt):
    """Polar rule on {|z| <= r_big} minus the given disjoint disks.

    Rays from the origin are clipped against the disks; the angular domain is
    split at all tangency angles so every cell has smooth boundary data.
    """
    origin_disks = [(c, r) for c, r in disks if abs(c) < r]
    other = [(c, r) for c, r in disks if abs(c) >= r]
    if len(origin_disks) > 1:
        raise ValueError("overlapping excluded disks at the origin")

    cut_angles = set()
    windows = []
    for c, r in other:
        beta = math.asin(min(1.0, r / abs(c)))
        phi = math.atan2(c.imag, c.real)
        cut_angles.add((phi - beta) % TWO_PI)
        cut_angles.add((phi + beta) % TWO_PI)
        windows.append((c, r, phi, beta))

    all_nodes, all_w = [], []

    def radial_intervals(theta):
        lo = 0.0
        if origin_disks:
            c, r = origin_disks[0]
            re = (c * np.exp(-1j * theta)).real
            lo = re + math.sqrt(max(r * r - (abs(c) ** 2 - re * re), 0.0))
        segments = [(lo, r_big)]
        for c, r, phi, beta in windows:
            delta = (theta - phi + math.pi) % TWO_PI - math.pi
            if abs(delta) >= beta:
                continue
            re = (c * np.exp(-1j * theta)).real
            disc = r * r - (abs(c) ** 2 - re * re)
            if disc <= 0:
                continue
            t0, t1 = re - math.sqrt(disc), re + math.sqrt(disc)
            nxt = []
            for a, b in segments:
                if t1 <= a or t0 >= b:
                    nxt.append((a, b))
                else:
                    if t0 > a:
                        nxt.append((a, t0))
                    if t1 < b:
                        nxt.append((t1, b))
            segments = nxt
        return segments

    if not cut_angles:
        theta = TWO_PI * np.arange(nt) / nt
        wt = np.full(nt, TWO_PI / nt)
        arcs = [(theta, wt)]
    else:
        cuts = sorted(cut_angles)
        arcs = []
        bounds = cuts + [cuts[0] + TWO_PI]
        for a, b in zip(bounds[:-1], bounds[1:]):
            n_arc = max(8, int(round(nt * (b - a) / TWO_PI)))
            # the clipped radial endpoints behave like sqrt(theta - a) at the
            # tangency angles; the Chebyshev substitution removes that root
            s, ws = _gl_on(0.0, math.pi, n_arc)
            t = a + (b - a) * 0.5 * (1.0 - np.cos(s))
            w = ws * (b - a) * 0.5 * np.sin(s)
            arcs.append((t, w))

    for theta, wt in arcs:
        for th, w_ang in zip(theta, wt):
            for a, b in radial_intervals(th):
                if b - a < 1e-13:
                    continue
                # band long radial stretches (ratio <= 4) so one panel never
                # spans widely different scales
                edges = [b]
                while edges[-1] > 4.0 * max(a, 0.3):
                    edges.append(edges[-1] / 4.0)
                edges.append(a)
                for hi, lo in zip(edges[:-1], edges[1:]):
                    rho, wr = _gl_on(lo, hi, nr)
                    all_nodes.append(rho * np.exp(1j * th))
                    all_w.append(rho * wr * w_ang)
    if not all_nodes:
        return np.zeros(0, complex), np.zeros(0)
    return np.concatenate(all_nodes), np.concatenate(all_w)


def sphere_cover(caps, spec: QuadratureSpec, level=0, excisions=None):
    """Cover the sphere by quadrature pieces.

    caps: list of Cap around the marked points (ends).
    excisions: optional dict index -> chart radius removed around that cap's
    point (for regularized integrals); the cap then starts at that radius
    instead of the ladder floor.
    """
    nr, nt = spec.at_level(level)
    excisions = excisions or {}
    pieces = []
    inf_cap = None
    obstacle_disks = []
    for j, cap in enumerate(caps):
        r_in = excisions.get(j, spec.inner_floor * cap.radius)
        nodes, w = annulus_nodes(r_in, cap.radius, nr, nt, spec.geometric_ratio)
        pieces.append(Piece(cap.chart, nodes, w))
        if is_infinity(cap.point):
            inf_cap = cap
        else:
            obstacle_disks.append(cap_image_disk(cap))

    if inf_cap is not None:
        r_big = 1.0 / inf_cap.radius
    else:
        outer = max((abs(c) + r for c, r in obstacle_disks), default=1.0)
        r_big = max(2.5, 1.6 * outer)

    for c, r in obstacle_disks:
        if abs(c) + r > r_big * 0.999:
            raise ValueError("cap image disk reaches the far-field boundary")

    nodes, w = far_field_nodes(r_big, obstacle_disks, nr, nt)
    pieces.append(Piece(IDENTITY, nodes, w))

    if inf_cap is None:
        nodes, w = disk_nodes(1.0 / r_big, nr, nt, spec.geometric_ratio, spec.inner_floor / 50.0)
        pieces.append(Piece(ZETA, nodes, w))
    return pieces


def worker_count():
    """Thread cap from WILLMORE_THREADS (default 1, i.e. serial)."""
    try:
        return max(1, int(os.environ.get("WILLMORE_THREADS", "1")))
    except ValueError:
        return 1


def integrate_pieces(pieces, integrand):
    """Sum integrand(chart, nodes) @ weights over the pieces.

    The integrand returns an array whose last axis runs over nodes; the
    result keeps the leading axes.  Pieces may be evaluated on worker
    threads, but contributions are always reduced in piece order, so results
    are independent of the thread count.
    """
    live = [p for p in pieces if p.nodes.size]

    def one(piece):
        vals = integrand(piece.chart, piece.nodes)
        return np.tensordot(np.asarray(vals), piece.weights, axes=([-1], [0]))

    workers = worker_count()
    if workers > 1 and len(live) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            contribs = list(pool.map(one, live))
    else:
        contribs = [one(p) for p in live]
    total = None
    for c in contribs:
        total = c if total is None else total + c
    return total


def adaptive_sphere_integral(caps, integrand, spec: QuadratureSpec, excisions=None):
    """Refine the cover until the integral settles; returns (value, error)."""
    prev = None
    err = math.inf
    for level in range(spec.start_level, spec.start_level + spec.max_refine + 1):
        pieces = sphere_cover(caps, spec, level, excisions)
        val = integrate_pieces(pieces, integrand)
        if prev is not None:
            err = float(np.max(np.abs(np.asarray(val) - np.asarray(prev))))
            scale = float(np.max(np.abs(np.asarray(val))))
            if err <= spec.atol + spec.rtol * scale:
                return val, err
        prev = val
    raise QuadratureNotConverged(val, err)


def circle_nodes(radius, nt, center=0.0):
    theta = TWO_PI * np.arange(nt) / nt
    return center + radius * np.exp(1j * theta), theta


def circulation(one_form, chart, radius, nt=256, center=0.0, clockwise=False):
    """Line integral of a chart one-form (A1 dx1 + A2 dx2) over a circle.

    one_form(chart, nodes) -> (A1, A2) arrays.  Positive orientation unless
    clockwise is set (the boundary orientation of the region outside the
    circle, as seen from the enclosed marked point).
    """
    nodes, theta = circle_nodes(radius, nt, center)
    a1, a2 = one_form(chart, nodes)
    dx1 = -radius * np.sin(theta)
    dx2 = radius * np.cos(theta)
    val = (a1 * dx1 + a2 * dx2).sum() * (TWO_PI / nt)
    return -val if clockwise else val
