"""Second-order forward-mode jets in the two real chart coordinates (x, y).

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to the chart coordinates, so chart expressions built from jet
arithmetic are differentiated exactly (to rounding).  Values may be arrays;
derivative axes are trailing: ``d`` has shape ``value.shape + (2,)`` and ``h``
has shape ``value.shape + (3,)`` holding (xx, xy, yy).
"""

from __future__ import annotations

import numpy as np


class Jet:
    __slots__ = ("v", "d", "h")
    __array_ufunc__ = None

    def __init__(self, v, d=None, h=None):
        v = np.asarray(v)
        self.v = v
        self.d = np.zeros(v.shape + (2,), dtype=v.dtype) if d is None else np.asarray(d)
        self.h = np.zeros(v.shape + (3,), dtype=v.dtype) if h is None else np.asarray(h)

    # -- construction -----------------------------------------------------
    @classmethod
    def coordinates(cls, x, y):
        """Independent jets for the chart coordinates at points ``(x, y)``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        x, y = np.broadcast_arrays(x, y)
        one, zero = np.ones_like(x), np.zeros_like(x)
        X = cls(x.copy(), np.stack([one, zero], -1), np.zeros(x.shape + (3,)))
        Y = cls(y.copy(), np.stack([zero, one], -1), np.zeros(x.shape + (3,)))
        return X, Y

    @property
    def shape(self):
        return self.v.shape

    @property
    def dx(self):
        return self.d[..., 0]

    @property
    def dy(self):
        return self.d[..., 1]

    def __getitem__(self, idx):
        # derivative axes are trailing, so leading-axis indexing carries over
        return Jet(self.v[idx], self.d[idx], self.h[idx])

    def __repr__(self):
        return f"Jet(v={self.v!r})"

    # -- chain rule helper --------------------------------------------------
    def _apply(self, f0, f1, f2):
        """Compose with a scalar function given its value and first two derivatives."""
        f1e = f1[..., None]
        d = f1e * self.d
        dx, dy = self.d[..., 0], self.d[..., 1]
        curv = np.stack([dx * dx, dx * dy, dy * dy], -1)
        h = f1e * self.h + f2[..., None] * curv
        return Jet(f0, d, h)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.v + other.v, self.d + other.d, self.h + other.h)
        other = np.asarray(other)
        return Jet(self.v + other, self.d + np.zeros_like(other)[..., None], self.h + np.zeros_like(other)[..., None])

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d, -self.h)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            v = a.v * b.v
            d = a.d * b.v[..., None] + a.v[..., None] * b.d
            adx, ady = a.d[..., 0], a.d[..., 1]
            bdx, bdy = b.d[..., 0], b.d[..., 1]
            cross = np.stack([2 * adx * bdx, adx * bdy + ady * bdx, 2 * ady * bdy], -1)
            h = a.h * b.v[..., None] + a.v[..., None] * b.h + cross
            return Jet(v, d, h)
        other = np.asarray(other)
        oe = other[..., None]
        return Jet(self.v * other, self.d * oe, self.h * oe)

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.v
        return self._apply(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if isinstance(k, (int, np.integer)):
            if k == 0:
                return Jet(np.ones_like(self.v), np.zeros_like(self.d), np.zeros_like(self.h))
            if k < 0:
                return (self ** (-k)).reciprocal()
            result = self
            for _ in range(k - 1):
                result = result * self
            return result
        return rpow(self, float(k))

    def conj(self):
        return Jet(np.conj(self.v), np.conj(self.d), np.conj(self.h))

    @property
    def real(self):
        return Jet(self.v.real, self.d.real, self.h.real)

    @property
    def imag(self):
        return Jet(self.v.imag, self.d.imag, self.h.imag)

    def dz(self):
        """Wirtinger derivative d/dz of the value."""
        return 0.5 * (self.d[..., 0] - 1j * self.d[..., 1])

    def dzbar(self):
        return 0.5 * (self.d[..., 0] + 1j * self.d[..., 1])

    def laplacian(self):
        return self.h[..., 0] + self.h[..., 2]


def rpow(a: Jet, p: float) -> Jet:
    """Real power of a jet with positive real value."""
    v = a.v
    return a._apply(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.v)
    return a._apply(e, e, e)


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    v = a.v
    return a._apply(np.log(v), 1.0 / v, -1.0 / v**2)


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    return a._apply(np.sin(a.v), np.cos(a.v), -np.sin(a.v))


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    return a._apply(np.cos(a.v), -np.sin(a.v), -np.cos(a.v))


def conj(a):
    return a.conj() if isinstance(a, Jet) else np.conj(a)


def value(a):
    return a.v if isinstance(a, Jet) else np.asarray(a)


def abs2(a):
    """|a|^2 as a real jet."""
    return (conj(a) * a).real if isinstance(a, Jet) else np.abs(a) ** 2


def stack(items, axis=0):
    """Stack jets (or constants broadcast against them) along a new leading axis."""
    if axis != 0:
        raise ValueError("only leading-axis stacking is supported")
    ref = next((it for it in items if isinstance(it, Jet)), None)
    if ref is None:
        return Jet(np.stack([np.asarray(it) for it in items]))
    shape = np.broadcast_shapes(*[(it.shape if isinstance(it, Jet) else np.shape(it)) for it in items])
    jets = [it if isinstance(it, Jet) else Jet(np.broadcast_to(np.asarray(it, dtype=complex), shape).copy()) for it in items]
    dtype = np.result_type(*[j.v.dtype for j in jets])
    v = np.stack([np.broadcast_to(j.v, shape).astype(dtype) for j in jets])
    d = np.stack([np.broadcast_to(j.d, shape + (2,)).astype(dtype) for j in jets])
    h = np.stack([np.broadcast_to(j.h, shape + (3,)).astype(dtype) for j in jets])
    return Jet(v, d, h)


def constant(c, shape):
    c = np.broadcast_to(np.asarray(c), shape).copy()
    return Jet(c)
