"""Truncated bivariate Taylor arithmetic.

A Jet holds the Taylor coefficients of a function of two chart coordinates
(x1, x2) up to a fixed total order, batched over an arbitrary trailing shape
of evaluation points.  Coefficients are Taylor-normalized (derivative divided
by i! j!), which makes the product a plain truncated convolution.  Holomorphic
functions are seeded from their complex derivative values, so no numerical
differentiation enters anywhere.
"""
from __future__ import annotations

import math

import numpy as np

MAX_ORDER = 4

# graded ordering of multi-indices (i, j), i + j <= MAX_ORDER
MULTI_INDEX = [(s - j, j) for s in range(MAX_ORDER + 1) for j in range(s + 1)]
SLOT = {ij: k for k, ij in enumerate(MULTI_INDEX)}
N_TERMS = len(MULTI_INDEX)  # 15

# multiplication table: (out_slot, a_slot, b_slot, out_degree)
_MUL = []
for (i1, j1) in MULTI_INDEX:
    for (i2, j2) in MULTI_INDEX:
        i, j = i1 + i2, j1 + j2
        if i + j <= MAX_ORDER:
            _MUL.append((SLOT[(i, j)], SLOT[(i1, j1)], SLOT[(i2, j2)], i + j))

_DEG = np.array([i + j for i, j in MULTI_INDEX])


def _terms(order):
    return (order + 1) * (order + 2) // 2


class Jet:
    """Taylor coefficients c[slot, ...batch] valid through total degree `order`."""

    __slots__ = ("c", "order")

    def __init__(self, c, order):
        self.c = c
        self.order = order

    # --- constructors ---------------------------------------------------
    @staticmethod
    def constant(value, shape=(), order=MAX_ORDER, dtype=None):
        value = np.asarray(value)
        dtype = dtype or value.dtype
        c = np.zeros((N_TERMS,) + tuple(shape), dtype=dtype)
        c[0] = value
        return Jet(c, order)

    @staticmethod
    def coordinate(values, axis, order=MAX_ORDER):
        """The chart coordinate x1 (axis=0) or x2 (axis=1) at the given points."""
        values = np.asarray(values, dtype=float)
        c = np.zeros((N_TERMS,) + values.shape, dtype=float)
        c[0] = values
        c[SLOT[(1, 0)] if axis == 0 else SLOT[(0, 1)]] = 1.0
        return Jet(c, order)

    @staticmethod
    def from_holomorphic(derivs, order=MAX_ORDER):
        """Jet of h(x1, x2) = f(x1 + i x2) from [f(z), f'(z), ..., f^(n)(z)]."""
        base = np.asarray(derivs[0], dtype=complex)
        c = np.zeros((N_TERMS,) + base.shape, dtype=complex)
        for (i, j) in MULTI_INDEX:
            if i + j > order or i + j >= len(derivs):
                continue
            c[SLOT[(i, j)]] = derivs[i + j] * (1j ** j) / (math.factorial(i) * math.factorial(j))
        return Jet(c, order)

    # --- views ------------------------------------------------------------
    @property
    def value(self):
        return self.c[0]

    def deriv_value(self, i, j):
        """Pointwise value of the (i, j) partial derivative."""
        if i + j > self.order:
            raise ValueError("derivative beyond jet order")
        return self.c[SLOT[(i, j)]] * (math.factorial(i) * math.factorial(j))

    def real(self):
        return Jet(self.c.real.copy(), self.order)

    def imag(self):
        return Jet(self.c.imag.copy(), self.order)

    def conj(self):
        return Jet(self.c.conj(), self.order)

    # --- ring operations ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(np.asarray(other), self.c.shape[1:], self.order)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        return Jet(self.c + other.c, order)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet(self.c - other.c, min(self.order, other.order))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * other, self.order)
        order = min(self.order, other.order)
        a, b = self.c, other.c
        dtype = np.result_type(a.dtype, b.dtype)
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=dtype)
        for o, s1, s2, deg in _MUL:
            if deg <= order:
                out[o] += a[s1] * b[s2]
        return Jet(out, order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / other, self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n: int):
        out = Jet.constant(np.ones((), dtype=self.c.dtype), self.c.shape[1:], self.order)
        base = self
        k = n
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # --- calculus -------------------------------------------------------------
    def deriv(self, axis):
        """Partial derivative jet; one order lower."""
        out = np.zeros_like(self.c)
        for (i, j) in MULTI_INDEX:
            src = (i + 1, j) if axis == 0 else (i, j + 1)
            if src in SLOT:
                k = i + 1 if axis == 0 else j + 1
                out[SLOT[(i, j)]] = self.c[SLOT[src]] * k
        return Jet(out, self.order - 1)

    def compose_scalar(self, outer_derivs):
        """g(self) where outer_derivs = [g(v), g'(v), ...] evaluated at v = self.value."""
        hat = self.c.copy()
        hat[0] = 0.0
        hat_jet = Jet(hat, self.order)
        out = Jet.constant(np.asarray(outer_derivs[0]), self.c.shape[1:], self.order)
        power = None
        fact = 1.0
        for k in range(1, min(self.order, len(outer_derivs) - 1) + 1):
            power = hat_jet if power is None else power * hat_jet
            fact *= k
            out = out + power * (np.asarray(outer_derivs[k]) / fact)
        return out

    def reciprocal(self):
        v = self.value
        derivs = [1.0 / v]
        for k in range(1, self.order + 1):
            derivs.append(derivs[-1] * (-k) / v)
        return self.compose_scalar(derivs)

    def sqrt(self):
        v = self.value
        r = np.sqrt(v)
        derivs = [r]
        coef = 0.5
        for k in range(1, self.order + 1):
            derivs.append(coef * r / v**k)
            coef *= 0.5 - k
        return self.compose_scalar(derivs)

    def log(self):
        v = self.value
        derivs = [np.log(v)]
        for k in range(1, self.order + 1):
            derivs.append(((-1.0) ** (k - 1)) * math.factorial(k - 1) / v**k)
        return self.compose_scalar(derivs)


def dot(a, b):
    """Euclidean pairing of two sequences of jets."""
    out = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        out = out + x * y
    return out


def cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


def laplacian_value(jet):
    """Flat chart Laplacian of the jet at the base point."""
    return jet.deriv_value(2, 0) + jet.deriv_value(0, 2)
