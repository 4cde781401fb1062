"""Second variation of the Willmore energy at an inverted minimal surface.

For a normal variation v of the inverted surface, with w = |X|^2 v pulled
back to the minimal surface X, the Hessian is the limit as R -> 0 of

    (1/2) Int_{Sigma_R} (Delta_g w - 2 K_g w)^2 dvol
    - 4 pi  Sum_j  Res_j / rho_j(R)^2 * v(p_j)^2

where Sigma_R excises the chart disk of radius rho_j(R) around the j-th
puncture (in its geodesic chart, the same chart used for the residue), and
Res_j is the chart residue norm.  The excision radii are scaled per end,
rho_j = s_j R with s_j close to the end scale alpha_j, and the limit is
Richardson-extrapolated along the radius schedule after the leading error
order is confirmed by a log-log fit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .charts import IDENTITY, ZETA, Chart
from .errors import (
    DegenerateMetric,
    GramIllConditioned,
    ImmersionLost,
    NoConvergence,
    ZeroResidueEnd,
)
from .fields import ScalarField, sphere_poly_basis
from .geometry import Frame, invert
from .jets import laplacian_value
from .quadrature import Piece, QuadratureSpec, annulus_nodes, sphere_cover
from .weierstrass import MinimalImmersion

DEFAULT_SCHEDULE = (0.2, 0.1, 0.05, 0.025)


@dataclass
class TestBasis:
    """Variation fields (polynomials on the round sphere) with their values
    at the punctures."""

    functions: list
    end_values: np.ndarray  # shape (n_functions, n_ends)
    degree: int | None = None

    @property
    def size(self):
        return len(self.functions)


def polynomial_test_basis(imm: MinimalImmersion, degree: int) -> TestBasis:
    funcs = sphere_poly_basis(degree)
    ev = np.array([[v(p) for p in imm.end_points()] for v in funcs])
    return TestBasis(functions=funcs, end_values=ev, degree=degree)


def basis_from_fields(imm: MinimalImmersion, fields_list) -> TestBasis:
    ev = np.array([[v(p) for p in imm.end_points()] for v in fields_list])
    return TestBasis(functions=list(fields_list), end_values=ev, degree=None)


@dataclass
class QuadraticFormAssembly:
    radii: np.ndarray
    end_scales: np.ndarray
    interior: dict
    counterterm: dict
    regularized: dict
    Q: np.ndarray
    extrapolation_error: float
    observed_order: float
    quadrature_error: float

    def interior_matrix(self, R):
        return self.interior[float(R)]

    def counterterm_matrix(self, R):
        return self.counterterm[float(R)]


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    negative_count: int
    null_count: int
    index_bound: int
    verdict: bool
    tol_neg: float
    extrapolation_error: float = 0.0

    def to_dict(self):
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "negative_count": int(self.negative_count),
            "null_count": int(self.null_count),
            "index_bound": int(self.index_bound),
            "verdict": bool(self.verdict),
            "tol_neg": float(self.tol_neg),
        }


# --- interior integrand -------------------------------------------------------

def _basis_L_values(imm_surface, basis, chart, u):
    """Rows L(v_k) = Delta_g w_k - 2 K w_k at the nodes, plus the conformal
    factor (the area density of the minimal surface)."""
    from .charts import sphere_coordinate_jets

    X = imm_surface.chart_jets(chart, u, 2)
    fr = Frame(X)
    e2l = fr.E.value
    K = fr.K.value
    inv_e2l = 1.0 / e2l
    norm2 = None
    for c in X:
        norm2 = c * c if norm2 is None else norm2 + c * c
    coords = sphere_coordinate_jets(chart, u, 2)
    rows = np.empty((len(basis.functions), u.size))
    for k, v in enumerate(basis.functions):
        wj = norm2 * v.chart_jet(chart, u, 2, coords=coords)
        rows[k] = laplacian_value(wj) * inv_e2l - 2.0 * K * wj.value
    return rows, e2l


def _interior_matrices(imm: MinimalImmersion, basis: TestBasis, radii, end_scales,
                       spec: QuadratureSpec, reference=None):
    """Interior matrices for every radius in the schedule, adaptively refined.

    The far field (everything outside the fixed end caps) is shared across
    radii; each radius only re-integrates the cap annuli from its excision
    circle out to the cap boundary.  Entries are polarized combinations of
    the scalar forms q(v) = (1/2) Int (L v)^2 dvol.

    `reference` (e.g. the counterterm matrices) is subtracted before judging
    convergence, since the raw interior entries grow like 1/R^2 while only
    the regularized differences matter downstream.
    """
    surface = imm.surface()
    caps = imm.caps()
    n = basis.size
    reference = reference or {float(R): 0.0 for R in radii}

    def gram_from_pieces(pieces):
        acc = np.zeros((n, n))
        for piece in pieces:
            if piece.nodes.size == 0:
                continue
            rows, e2l = _basis_L_values(surface, basis, piece.chart, piece.nodes)
            wts = piece.weights * e2l
            # polarization of q(v) = 1/2 sum w (L v)^2: diagonal directly,
            # off-diagonal from q(v_k + v_l) - q(v_k - v_l)
            for k in range(n):
                acc[k, k] += 0.5 * np.dot(wts, rows[k] * rows[k])
                for l in range(k + 1, n):
                    plus = rows[k] + rows[l]
                    minus = rows[k] - rows[l]
                    q_plus = 0.5 * np.dot(wts, plus * plus)
                    q_minus = 0.5 * np.dot(wts, minus * minus)
                    val = 0.25 * (q_plus - q_minus)
                    acc[k, l] += val
                    acc[l, k] += val
        return acc

    prev = None
    for level in range(spec.start_level, spec.start_level + spec.max_refine + 1):
        nr, nt = spec.at_level(level)
        far_pieces = [p for p in sphere_cover(caps, spec, level,
                                              excisions={j: caps[j].radius for j in range(len(caps))})
                      if p.nodes.size]
        far_matrix = gram_from_pieces(far_pieces)
        out = {}
        for R in radii:
            mats = far_matrix.copy()
            cap_pieces = []
            for j, cap in enumerate(caps):
                nodes, w = annulus_nodes(end_scales[j] * R, cap.radius, nr, nt,
                                         spec.geometric_ratio)
                cap_pieces.append(Piece(cap.chart, nodes, w))
            mats += gram_from_pieces(cap_pieces)
            out[float(R)] = mats
        if prev is not None:
            err = max(
                float(np.max(np.abs(out[float(R)] - prev[float(R)]))) for R in radii
            )
            scale = max(
                1.0,
                max(float(np.max(np.abs(out[float(R)] - reference[float(R)]))) for R in radii),
            )
            if err <= spec.atol + spec.rtol * scale:
                return out, err
        prev = out
    err = max(float(np.max(np.abs(out[float(R)] - prev[float(R)]))) for R in radii)
    return out, err


def _richardson(values, radii, order, stages=2, order_step=1.0):
    """Neville elimination of the error terms R^order, R^(order+order_step)..."""
    vals = [np.asarray(v, dtype=float) for v in values]
    rads = list(map(float, radii))
    correction = 0.0
    p = order
    for _ in range(stages):
        if len(vals) < 2:
            break
        nxt, nxt_r = [], []
        for i in range(len(vals) - 1):
            a, ra = vals[i], rads[i]
            b, rb = vals[i + 1], rads[i + 1]
            t_a, t_b = ra**p, rb**p
            nxt.append((t_a * b - t_b * a) / (t_a - t_b))
            nxt_r.append(rb)
        correction = float(np.max(np.abs(nxt[-1] - vals[-1])))
        vals, rads = nxt, nxt_r
        p += order_step
    return vals[-1], correction


def assemble_Q(imm: MinimalImmersion, basis: TestBasis,
               schedule=DEFAULT_SCHEDULE, spec: QuadratureSpec | None = None
               ) -> QuadraticFormAssembly:
    """Assemble the regularized Hessian matrix on the given basis."""
    spec = spec or QuadratureSpec()
    radii = np.asarray(sorted(set(float(r) for r in schedule), reverse=True))
    if len(radii) < 4:
        raise ValueError("schedule must contain at least 4 decreasing radii")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    caps = imm.caps()
    res = np.array([e.residue_norm for e in imm.ends])
    if np.any(res < 1e-10):
        raise ZeroResidueEnd("an end carries numerically zero residue")
    alphas = np.array([e.alpha for e in imm.ends])
    end_scales = np.minimum(alphas, 0.45 * np.array([c.radius for c in caps]) / radii[0])

    counterterm = {}
    ev = basis.end_values
    for R in radii:
        ct = np.zeros((basis.size, basis.size))
        for j in range(len(caps)):
            rho = end_scales[j] * R
            ct += 4.0 * math.pi * res[j] / rho**2 * np.outer(ev[:, j], ev[:, j])
        counterterm[float(R)] = ct

    interior, quad_err = _interior_matrices(imm, basis, radii, end_scales, spec,
                                            reference=counterterm)

    regularized = {}
    for R in radii:
        regularized[float(R)] = interior[float(R)] - counterterm[float(R)]

    reg_seq = [regularized[float(R)] for R in radii]
    diffs = [float(np.max(np.abs(b - a))) for a, b in zip(reg_seq[:-1], reg_seq[1:])]
    scale = max(1.0, float(np.max(np.abs(reg_seq[-1]))))
    if diffs[-1] > 1e-2 * scale:
        raise NoConvergence(diffs[-1] / scale)

    floor = max(quad_err, 1e-12 * scale)
    if diffs[-1] <= 10.0 * floor:
        # already converged at quadrature accuracy; no extrapolation needed
        Q = reg_seq[-1]
        extrap_err = max(diffs[-1], floor)
        observed = math.inf
    else:
        orders = []
        for i in range(len(diffs) - 1):
            if diffs[i + 1] > floor and diffs[i] > floor:
                ratio = radii[i] / radii[i + 1]
                orders.append(math.log(diffs[i] / diffs[i + 1]) / math.log(ratio))
        observed = float(np.median(orders)) if orders else 1.0
        lead = min(max(round(observed), 1), 2)
        Q, corr = _richardson(reg_seq, radii, lead, stages=2)
        extrap_err = max(corr, floor)
    Q = 0.5 * (Q + Q.T)
    return QuadraticFormAssembly(
        radii=radii,
        end_scales=end_scales,
        interior=interior,
        counterterm=counterterm,
        regularized=regularized,
        Q=Q,
        extrapolation_error=float(extrap_err),
        observed_order=float(observed),
        quadrature_error=float(quad_err),
    )


def q_value(imm: MinimalImmersion, v: ScalarField, schedule=DEFAULT_SCHEDULE,
            spec: QuadratureSpec | None = None) -> float:
    """Q(v, v) for a single variation field."""
    basis = basis_from_fields(imm, [v])
    return float(assemble_Q(imm, basis, schedule, spec).Q[0, 0])


def vanishing_at_ends(imm: MinimalImmersion, v: ScalarField) -> ScalarField:
    """Correct v by a low-degree interpolant so it vanishes at every end.

    Uses {1, n1, n2, n3} (enough for up to 4 ends in general position); the
    counterterm of the corrected field is identically zero.
    """
    correctors = sphere_poly_basis(1)
    pts = imm.end_points()
    if len(pts) > len(correctors):
        raise ValueError("more ends than interpolation functions")
    M = np.array([[b(p) for b in correctors] for p in pts])
    rhs = np.array([v(p) for p in pts])
    lam, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    out = v
    for coef, b in zip(lam, correctors):
        out = out - float(coef) * b
    return out


# --- inertia -------------------------------------------------------------------

def gram_matrix(basis: TestBasis, spec: QuadratureSpec | None = None):
    """L^2 inner products of the basis over the unit round sphere."""
    spec = spec or QuadratureSpec()
    nr, nt = spec.at_level(spec.start_level + 1)
    pieces = []
    for chart in (IDENTITY, ZETA):
        nodes, w = annulus_nodes(1e-9, 1.0, max(nr, 24), max(nt, 96), 2.0)
        pieces.append(Piece(chart, nodes, w))

    G = np.zeros((basis.size, basis.size))
    for piece in pieces:
        u = piece.nodes
        dens = 4.0 / (1.0 + np.abs(u) ** 2) ** 2
        V = np.stack([v.chart_jet(piece.chart, u, 0).value for v in basis.functions])
        G += (V * (piece.weights * dens)) @ V.T
    return 0.5 * (G + G.T)


def inertia(assembly: QuadraticFormAssembly, index_bound: int,
            tol_neg: float | None = None, gram: np.ndarray | None = None,
            basis: TestBasis | None = None) -> SpectralReport:
    """Eigenvalue inertia of Q against the basis Gram matrix."""
    Q = assembly.Q
    if gram is None:
        if basis is None:
            raise ValueError("need either a Gram matrix or the basis")
        gram = gram_matrix(basis)
    cond = np.linalg.cond(gram)
    if cond > 1e8:
        raise GramIllConditioned(f"Gram condition number {cond:.3e}")
    w = eigh(Q, gram, eigvals_only=True)
    spectral_radius = float(np.max(np.abs(w))) if len(w) else 0.0
    if tol_neg is None:
        tol_neg = max(100.0 * assembly.extrapolation_error, 1e-7 * spectral_radius)
    neg = int(np.sum(w < -tol_neg))
    null = int(np.sum(np.abs(w) <= tol_neg))
    return SpectralReport(
        eigenvalues=np.sort(w),
        negative_count=neg,
        null_count=null,
        index_bound=index_bound,
        verdict=bool(neg <= index_bound),
        tol_neg=float(tol_neg),
        extrapolation_error=float(assembly.extrapolation_error),
    )


# --- finite-difference Hessian oracle -------------------------------------------

def _energy_density(surface, chart, u):
    X = surface.chart_jets(chart, u, 2)
    fr = Frame(X)
    return fr.H.value**2 * fr.area_density().value


def fd_hessian_oracle(imm: MinimalImmersion, v: ScalarField,
                      steps=(0.08, 0.04, 0.02, 0.01),
                      spec: QuadratureSpec | None = None) -> float:
    """Second derivative of the Willmore energy along the normal graph
    psi_t = psi + t v n of the inverted surface, by central differences
    Richardson-extrapolated over the steps.

    The difference of energy densities is integrated in a single pass, so the
    quadrature error scales with the (small) difference rather than with the
    energies themselves; steps are normalized by the sup of v so the graphs
    stay uniformly immersed.
    """
    spec = spec or QuadratureSpec(rtol=1e-9, atol=1e-12, max_refine=4)
    psi = invert(imm.surface())
    caps = psi.caps()
    v_scale = _field_sup_estimate(v)
    steps = sorted((t / max(1.0, v_scale) for t in steps), reverse=True)

    def all_differences(level):
        """One pass over the cover: base frame and normal are shared by all
        graph steps, and the energy-density differences are accumulated per
        step so quadrature error scales with the differences themselves."""
        pieces = sphere_cover(caps, spec, level)
        sums = np.zeros(len(steps))
        for piece in pieces:
            if piece.nodes.size == 0:
                continue
            X = psi.chart_jets(piece.chart, piece.nodes, 3)
            fr = Frame(X)
            vj = v.chart_jet(piece.chart, piece.nodes, 2)
            disp = [n * vj for n in fr.normal]
            base = fr.H.value**2 * fr.area_density().value
            for i, t in enumerate(steps):
                try:
                    d = 0.0
                    for s in (t, -t):
                        frt = Frame([x + g * s for x, g in zip(X, disp)])
                        d = d + frt.H.value**2 * frt.area_density().value
                except DegenerateMetric as exc:
                    raise ImmersionLost(t) from exc
                sums[i] += np.dot(d - 2.0 * base, piece.weights)
        return sums

    prev = None
    for level in range(spec.start_level, spec.start_level + spec.max_refine + 1):
        vals = all_differences(level)
        if prev is not None:
            err = float(np.max(np.abs(vals - prev)))
            if err <= spec.atol + spec.rtol * float(np.max(np.abs(vals))):
                break
        prev = vals
    seq = [vals[i] / t**2 for i, t in enumerate(steps)]
    # central differences carry only even powers of the step
    out, _ = _richardson(seq, steps, order=2, stages=min(3, len(seq) - 1), order_step=2.0)
    return float(out)


def _field_sup_estimate(v: ScalarField, n=400):
    rng = np.random.default_rng(11)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    vals = v.chart_jet(IDENTITY, z, 0).value
    vals2 = v.chart_jet(ZETA, z, 0).value
    return float(max(np.abs(vals).max(), np.abs(vals2).max()))


# --- conformal reparametrization invariance --------------------------------------

def mobius_rotation_matrix(chart: Chart):
    """SO(3) matrix R with n(mu(z)) = R n(z) for a Mobius map that is an
    isometry of the round sphere; raises ValueError otherwise."""
    from .charts import sphere_coordinate_jets

    probes = np.array([0.3 + 0.1j, -0.7 + 0.4j, 0.2 - 0.9j, 1.1 + 0.8j, -0.25 - 0.35j])

    def coords(pts):
        return np.stack([j.value for j in sphere_coordinate_jets(IDENTITY, pts, 0)], axis=1)

    src = coords(probes)
    dst = coords(np.asarray([complex(chart.to_sphere(p)) for p in probes]))
    R, *_ = np.linalg.lstsq(src, dst, rcond=None)
    R = R.T
    if np.max(np.abs(R @ R.T - np.eye(3))) > 1e-8:
        raise ValueError("Mobius map is not an isometry of the round sphere")
    return R


def mobius_invariance_check(imm: MinimalImmersion, v: ScalarField, mobius: Chart,
                            schedule=DEFAULT_SCHEDULE,
                            spec: QuadratureSpec | None = None) -> float:
    """|Q_{f o mu}(v o mu) - Q_f(v)| for a sphere-isometry Mobius map mu."""
    from .weierstrass import build_from_f

    R = mobius_rotation_matrix(mobius)
    f_new = tuple(
        fj.compose_mobius(mobius.a, mobius.b, mobius.c, mobius.d) for fj in imm.f
    )
    imm_new = build_from_f(f_new, imm.translation)
    if hasattr(v, "rotated"):
        v_new = v.rotated(R)
    else:
        v_new = v  # constants
    q0 = q_value(imm, v, schedule, spec)
    q1 = q_value(imm_new, v_new, schedule, spec)
    return abs(q1 - q0)
