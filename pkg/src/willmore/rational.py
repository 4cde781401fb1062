"""Complex rational functions on the Riemann sphere.

Coefficients are stored ascending in the degree, and the canonical form keeps
the denominator monic.  Everything here is plain floating point: common roots
of numerator and denominator are cancelled by root matching within a
tolerance, not symbolically.  The residue attached to the point at infinity is
the residue of the differential f(z)dz there, i.e. the coefficient of 1/t in
-f(1/t)/t^2, so that the residues of a rational differential always sum to
zero over the whole sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedRoots, LogarithmicObstruction

INFINITY = complex(math.inf, 0.0)

DEFAULT_TOL = 1e-9


def is_infinity(z) -> bool:
    if z is INFINITY:
        return True
    try:
        return math.isinf(complex(z).real) or math.isinf(complex(z).imag)
    except (TypeError, OverflowError):
        return False


def _trim(coeffs, tol=0.0):
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1:
        raise ValueError("coefficients must be one-dimensional")
    scale = np.abs(c).max() if c.size else 0.0
    cut = c.size
    while cut > 1 and abs(c[cut - 1]) <= tol * scale:
        cut -= 1
    if cut == 1 and abs(c[0]) <= tol * scale:
        return np.zeros(1, dtype=complex)
    return c[:cut].copy()


class ComplexPolynomial:
    """Polynomial with complex coefficients, ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, trim_tol=0.0):
        self.coeffs = _trim(coeffs, trim_tol)
        self.coeffs.setflags(write=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self, tol=0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out if out.shape else complex(out)

    def derivative(self) -> "ComplexPolynomial":
        if self.degree == 0:
            return ComplexPolynomial([0.0])
        k = np.arange(1, len(self.coeffs))
        return ComplexPolynomial(self.coeffs[1:] * k)

    def antiderivative(self) -> "ComplexPolynomial":
        k = np.arange(1, len(self.coeffs) + 1)
        return ComplexPolynomial(np.concatenate([[0.0], self.coeffs / k]))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] = self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return ComplexPolynomial(a, trim_tol=1e-15)

    def __sub__(self, other):
        return self + (_as_poly(other) * (-1.0))

    def __mul__(self, other):
        if np.isscalar(other):
            return ComplexPolynomial(self.coeffs * complex(other))
        other = _as_poly(other)
        return ComplexPolynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def monic(self):
        lead = self.coeffs[-1]
        return ComplexPolynomial(self.coeffs / lead), lead

    def deflate(self, root) -> "ComplexPolynomial":
        """Synthetic division of p by (z - root); remainder is discarded."""
        c = self.coeffs
        out = np.zeros(max(len(c) - 1, 1), dtype=complex)
        acc = 0.0 + 0.0j
        for i in range(len(c) - 1, 0, -1):
            acc = c[i] + acc * root
            out[i - 1] = acc
        return ComplexPolynomial(out)

    def roots(self, tol=DEFAULT_TOL):
        """Roots via the companion matrix, polished with one Newton step."""
        if self.degree == 0:
            return np.zeros(0, dtype=complex)
        mon, _ = self.monic()
        r = np.roots(mon.coeffs[::-1])
        dp = self.derivative()
        for _ in range(2):
            num = self(r)
            den = dp(r)
            ok = np.abs(den) > 1e-300
            r = np.where(ok, r - np.where(ok, num, 0) / np.where(ok, den, 1), r)
        resid = np.abs(mon(r))
        scale = 1.0 + np.abs(r) ** max(self.degree, 1)
        if np.any(resid > math.sqrt(tol) * scale):
            raise IllConditionedRoots(
                f"root residual {resid.max():.3e} on degree-{self.degree} polynomial"
            )
        return r

    def __repr__(self):
        return f"ComplexPolynomial({list(self.coeffs)})"


def _as_poly(p) -> ComplexPolynomial:
    if isinstance(p, ComplexPolynomial):
        return p
    if np.isscalar(p):
        return ComplexPolynomial([complex(p)])
    return ComplexPolynomial(p)


def _cluster(points, radius):
    """Group nearly equal complex numbers; returns list of (center, count)."""
    groups = []
    for p in sorted(points, key=lambda t: (t.real, t.imag)):
        for g in groups:
            if abs(p - g[0] / g[1]) <= radius * max(1.0, abs(p)):
                g[0] += p
                g[1] += 1
                break
        else:
            groups.append([p, 1])
    return [(g[0] / g[1], g[1]) for g in groups]


@dataclass(frozen=True)
class PoleRecord:
    """A pole of the differential f(z)dz: location, order and residue.

    At a finite point the order and residue are those of the function itself;
    at infinity they are read off the pullback -f(1/t)/t^2 at t = 0.
    """

    location: complex
    order: int
    residue: complex

    def at_infinity(self) -> bool:
        return is_infinity(self.location)


class RationalFunction:
    """Quotient of two complex polynomials, kept reduced and den-monic."""

    __slots__ = ("num", "den", "_hash", "_deriv_cache")

    def __init__(self, num, den=(1.0,), reduce=True, tol=DEFAULT_TOL):
        num = _as_poly(num)
        den = _as_poly(den)
        if den.is_zero():
            raise ZeroDivisionError("denominator is identically zero")
        if reduce and not num.is_zero():
            num, den = _reduce(num, den, tol)
        den, lead = den.monic()
        num = num * (1.0 / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_deriv_cache", [])

    # --- basic protocol -------------------------------------------------
    def __hash__(self):
        if self._hash is None:
            h = hash((self.num.coeffs.tobytes(), self.den.coeffs.tobytes()))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (
            np.array_equal(self.num.coeffs, other.num.coeffs)
            and np.array_equal(self.den.coeffs, other.den.coeffs)
        )

    def __repr__(self):
        return f"RationalFunction({list(self.num.coeffs)}, {list(self.den.coeffs)})"

    def is_zero(self, tol=0.0):
        return self.num.is_zero(tol)

    def is_constant(self):
        return self.num.degree == 0 and self.den.degree == 0

    # --- evaluation ------------------------------------------------------
    def __call__(self, z):
        """Evaluate, with infinity both as input and output value."""
        if np.isscalar(z) and is_infinity(z):
            return self.value_at_infinity()
        z = np.asarray(z, dtype=complex)
        n = self.num(z)
        d = self.den(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(d == 0, np.where(n == 0, np.nan, np.inf), n / np.where(d == 0, 1, d))
        return out if out.shape else complex(out)

    def value_at_infinity(self):
        dn, dd = self.num.degree, self.den.degree
        if self.num.is_zero():
            return 0.0 + 0.0j
        if dn > dd:
            return INFINITY
        if dn < dd:
            return 0.0 + 0.0j
        return complex(self.num.coeffs[-1] / self.den.coeffs[-1])

    # --- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _as_rational(other)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other):
        other = _as_rational(other)
        return RationalFunction(
            self.num * other.den - other.num * self.den, self.den * other.den
        )

    def __mul__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num * other, self.den, reduce=False)
        other = _as_rational(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def derivative(self) -> "RationalFunction":
        """Quotient rule, reduced."""
        n, d = self.num, self.den
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def derivatives(self, order: int):
        """[f, f', ..., f^(order)] as rational objects, cached on the instance."""
        cache = self._deriv_cache
        if not cache:
            cache.append(self)
        while len(cache) <= order:
            cache.append(cache[-1].derivative())
        return cache[: order + 1]

    def derivatives_at(self, u, order: int):
        """Pointwise [f(u), f'(u), ..., f^(order)(u)] by the Leibniz recursion

            f^(k) = (n^(k) - sum_{j<k} C(k,j) f^(j) d^(k-j)) / d.

        This stays accurate near poles, where chaining symbolic quotient-rule
        derivatives (with their den^2, den^4, ... reductions) loses digits.
        """
        u = np.asarray(u, dtype=complex)
        n_polys = [self.num]
        d_polys = [self.den]
        for _ in range(order):
            n_polys.append(n_polys[-1].derivative())
            d_polys.append(d_polys[-1].derivative())
        nv = [p(u) for p in n_polys]
        dv = [p(u) for p in d_polys]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_d = 1.0 / dv[0]
        out = [nv[0] * inv_d]
        for k in range(1, order + 1):
            acc = nv[k]
            for j in range(k):
                acc = acc - math.comb(k, j) * out[j] * dv[k - j]
            out.append(acc * inv_d)
        return out

    # --- structure --------------------------------------------------------
    def compose_mobius(self, a, b, c, d) -> "RationalFunction":
        """f((a z + b)/(c z + d)) as a rational function of z."""
        num, den = self.num, self.den
        n = max(num.degree, den.degree)
        A = ComplexPolynomial([b, a])
        C = ComplexPolynomial([d, c])
        powsA = [ComplexPolynomial([1.0])]
        powsC = [ComplexPolynomial([1.0])]
        for _ in range(n):
            powsA.append(powsA[-1] * A)
            powsC.append(powsC[-1] * C)
        top = ComplexPolynomial([0.0])
        bot = ComplexPolynomial([0.0])
        for k, ck in enumerate(num.coeffs):
            top = top + powsA[k] * powsC[n - k] * ck
        for k, ck in enumerate(den.coeffs):
            bot = bot + powsA[k] * powsC[n - k] * ck
        return RationalFunction(top, bot)

    def reciprocal_argument(self) -> "RationalFunction":
        """f(1/z)."""
        return self.compose_mobius(0.0, 1.0, 1.0, 0.0)

    def finite_poles(self, tol=DEFAULT_TOL):
        """Clustered denominator roots as (location, order) pairs.

        A root of multiplicity m comes out of the companion matrix with error
        about eps^(1/m), so clustering uses a radius floored at 3e-7; merged
        clusters are then re-polished on the (m-1)-th derivative, where the
        multiple root is simple again.
        """
        if self.den.degree == 0:
            return []
        radius = max(tol, 3e-7)
        clusters = _cluster(list(self.den.roots(tol)), radius)
        out = []
        for p, m in clusters:
            if m > 1:
                dpoly = self.den
                for _ in range(m - 1):
                    dpoly = dpoly.derivative()
                dd = dpoly.derivative()
                for _ in range(3):
                    val = dpoly(p)
                    slope = dd(p)
                    if abs(slope) < 1e-280:
                        break
                    p = p - val / slope
            out.append((p, m))
        return out

    def residue_at(self, pole, order=None, tol=DEFAULT_TOL):
        """Residue at a finite pole (coefficient of 1/(z - pole)); zero when
        the function is regular there."""
        den_scale = np.abs(self.den.coeffs).max()
        if abs(self.den(pole)) > math.sqrt(tol) * den_scale * max(1.0, abs(pole)) ** self.den.degree:
            return 0.0 + 0.0j
        if order is None:
            order = next(
                (m for p, m in self.finite_poles(tol) if abs(p - pole) <= 100 * tol * max(1, abs(p))),
                1,
            )
        if order == 1:
            return complex(self.num(pole) / self.den.derivative()(pole))
        q = self.den
        for _ in range(order):
            q = q.deflate(pole)
        g = RationalFunction(self.num, q)
        for _ in range(order - 1):
            g = g.derivative()
        return complex(g(pole) / math.factorial(order - 1))

    def dz_form_at_infinity(self) -> "RationalFunction":
        """Coefficient g(t) of the pullback f(z)dz = g(t)dt under z = 1/t."""
        return self.reciprocal_argument() * RationalFunction([0, 0, -1.0]).reciprocal_argument()

    def laurent_at(self, point, lowest, highest, tol=DEFAULT_TOL):
        """Laurent coefficients {power: coeff} of self around a finite point,
        for powers in [lowest, highest]."""
        order = 0
        for p, m in self.finite_poles(tol):
            if abs(p - point) <= 100 * tol * max(1.0, abs(p)):
                order = max(order, m)
        q = self.den
        for _ in range(order):
            q = q.deflate(point)
        h = RationalFunction(self.num, q)  # analytic at the point
        out = {}
        fact = 1.0
        for k in range(0, highest + order + 1):
            if lowest <= k - order <= highest:
                out[k - order] = complex(h(point)) / fact
            h = h.derivative()
            fact *= k + 1
        for j in range(lowest, highest + 1):
            out.setdefault(j, 0.0 + 0.0j)
        return out

    def laurent_at_infinity(self, lowest, highest, tol=DEFAULT_TOL):
        """Laurent coefficients {power: coeff} of f(1/t) at t = 0."""
        return self.reciprocal_argument().laurent_at(0.0, lowest, highest, tol)


def _as_rational(r) -> RationalFunction:
    if isinstance(r, RationalFunction):
        return r
    return RationalFunction(_as_poly(r))


def _reduce(num: ComplexPolynomial, den: ComplexPolynomial, tol):
    """Cancel common roots of num and den matched within tol."""
    if num.degree == 0 or den.degree == 0:
        return num, den
    try:
        nr = list(num.roots(max(tol, 1e-7)))
        dr = list(den.roots(max(tol, 1e-7)))
    except IllConditionedRoots:
        return num, den
    lead_n = num.coeffs[-1]
    lead_d = den.coeffs[-1]
    changed = False
    for r in dr[:]:
        j = next((i for i, s in enumerate(nr) if abs(s - r) <= tol * max(1.0, abs(r))), None)
        if j is not None:
            nr.pop(j)
            dr.remove(r)
            changed = True
    if not changed:
        return num, den
    return _from_roots(nr, lead_n), _from_roots(dr, lead_d)


def _from_roots(roots, lead):
    c = np.array([1.0 + 0.0j])
    for r in roots:
        c = np.convolve(c, np.array([-r, 1.0 + 0.0j]))
    return ComplexPolynomial(c * lead)


# --- module-level operations ------------------------------------------------

def evaluate(rf: RationalFunction, z):
    """Value of rf at z, where both z and the result may be infinity."""
    return rf(z)


def derivative(rf: RationalFunction) -> RationalFunction:
    return rf.derivative()


def find_poles(rf: RationalFunction, tol=DEFAULT_TOL):
    """All poles of the differential rf(z)dz on the sphere.

    Finite entries are the poles of the function with their Laurent residues.
    The record at infinity (present whenever numerator degree >= denominator
    degree - 1) carries the order and residue of the pulled-back differential,
    so the residues of every returned record sum to zero.
    """
    records = []
    if rf.is_zero():
        return records
    for p, m in rf.finite_poles(tol):
        records.append(PoleRecord(complex(p), int(m), rf.residue_at(p, m, tol)))
    g = rf.dz_form_at_infinity()
    inf_orders = [m for p, m in g.finite_poles(tol) if abs(p) <= 100 * tol]
    if inf_orders:
        m = max(inf_orders)
        records.append(PoleRecord(INFINITY, int(m), g.residue_at(0.0, m, tol)))
    return records


def residue_sum(rf: RationalFunction, tol=DEFAULT_TOL) -> complex:
    return sum((p.residue for p in find_poles(rf, tol)), 0.0 + 0.0j)


def antiderivative(rf: RationalFunction, tol=DEFAULT_TOL) -> RationalFunction:
    """Rational F with F' = rf and F(0) = 0 contribution fixed to zero constant.

    Raises LogarithmicObstruction naming the first finite pole whose residue
    exceeds the tolerance, since such a pole admits no rational primitive.
    """
    scale = max(np.abs(rf.num.coeffs).max(), 1e-300)
    poles = rf.finite_poles(tol)
    # polynomial part by euclidean division
    poly_part, rem = _divmod_poly(rf.num, rf.den)
    terms = [RationalFunction(poly_part.antiderivative(), reduce=False)]
    proper = RationalFunction(rem, rf.den, reduce=False)
    for p, m in poles:
        res = proper.residue_at(p, m, tol)
        if abs(res) > max(tol, 1e-10 * scale):
            raise LogarithmicObstruction(complex(p), complex(res))
        # principal part coefficients a_j/(z-p)^j, j = 2..m
        shifted_den = proper.den
        for _ in range(m):
            shifted_den = shifted_den.deflate(p)
        h = RationalFunction(proper.num, shifted_den)  # analytic at p
        fact = 1.0
        derivs = [h]
        for k in range(1, m):
            derivs.append(derivs[-1].derivative())
        for j in range(2, m + 1):
            # coefficient of (z-p)^{-j} is h^{(m-j)}(p)/(m-j)!
            k = m - j
            a = complex(derivs[k](p)) / math.factorial(k)
            if a != 0:
                denom = _from_roots([p] * (j - 1), 1.0)
                terms.append(RationalFunction(ComplexPolynomial([-a / (j - 1)]), denom, reduce=False))
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _divmod_poly(num: ComplexPolynomial, den: ComplexPolynomial):
    if num.degree < den.degree:
        return ComplexPolynomial([0.0]), num
    q, r = np.polydiv(num.coeffs[::-1], den.coeffs[::-1])
    return ComplexPolynomial(np.atleast_1d(q)[::-1]), ComplexPolynomial(np.atleast_1d(r)[::-1], trim_tol=1e-13)


def from_coeff_lists(num_pairs, den_pairs) -> RationalFunction:
    """Build from [[re, im], ...] ascending coefficient lists (wire format)."""
    num = [complex(a, b) for a, b in num_pairs]
    den = [complex(a, b) for a, b in den_pairs]
    return RationalFunction(num, den)


def to_coeff_lists(rf: RationalFunction):
    return (
        [[float(c.real), float(c.imag)] for c in rf.num.coeffs],
        [[float(c.real), float(c.imag)] for c in rf.den.coeffs],
    )
