"""Truncated Taylor series and forward-mode dual numbers.

These are the two numeric types the integrator and the hand-coded vector
fields are generic over.  A field written with ``+ - * /`` and :func:`jsqrt`
evaluates unchanged on floats (point evaluation), on :class:`TSeries`
(Taylor recurrence), and on :class:`Dual` wrapping either payload
(derivatives, including Jacobian-times-matrix products for the variational
equations).
"""

from __future__ import annotations

import numpy as np

__all__ = ["TSeries", "Dual", "jsqrt", "lift_dual", "dual_jacobian"]

_scalar_types = (int, float, np.floating, np.integer)


_toeplitz_cache = {}


def _tri_toeplitz(a):
    """Lower-triangular Toeplitz matrix T[i, j] = a[i - j] for i >= j."""
    n = a.shape[0]
    cached = _toeplitz_cache.get(n)
    if cached is None:
        idx = np.arange(n)
        shift = idx[:, None] - idx[None, :]
        cached = (np.clip(shift, 0, n - 1), shift >= 0)
        _toeplitz_cache[n] = cached
    take, mask = cached
    return np.where(mask, a[take], 0.0)


class TSeries:
    """Truncated power series sum_k c[k] t^k.

    ``c`` has shape (n,) for a scalar series or (n, m) for a batch of m
    series sharing the order axis (used for gradient channels).  Products
    between two batched series are not defined; first-order dual arithmetic
    never needs them.
    """

    __slots__ = ("c",)

    def __init__(self, c):
        if type(c) is not np.ndarray or c.dtype != np.float64:
            c = np.asarray(c, dtype=float)
        self.c = c

    @property
    def n(self):
        return self.c.shape[0]

    @property
    def batched(self):
        return self.c.ndim == 2

    @classmethod
    def constant(cls, value, n, m=None):
        c = np.zeros(n if m is None else (n, m))
        c[0] = value
        return cls(c)

    def __repr__(self):
        return f"TSeries({self.c!r})"

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TSeries):
            a, b = self.c, other.c
            if a.ndim < b.ndim:
                a, b = b, a
            out = a.copy()
            if b.ndim < out.ndim:
                out += b[:, None]
            else:
                out += b
            return TSeries(out)
        if isinstance(other, _scalar_types):
            out = self.c.copy()
            out[0] += other
            return TSeries(out)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return TSeries(-self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TSeries) else -1.0 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TSeries):
            n = self.n
            a, b = self.c, other.c
            if a.ndim == 1 and b.ndim == 1:
                return TSeries(np.convolve(a, b)[:n])
            if a.ndim == 2 and b.ndim == 2:
                raise ValueError("product of two batched series is undefined")
            scalar, batch = (a, b) if a.ndim == 1 else (b, a)
            return TSeries(_tri_toeplitz(scalar) @ batch)
        if isinstance(other, _scalar_types):
            return TSeries(self.c * other)
        return NotImplemented

    __rmul__ = __mul__

    def recip(self):
        """Series 1 / self (scalar series only)."""
        b = self.c
        if b.ndim != 1:
            raise ValueError("reciprocal of a batched series is undefined")
        n = b.shape[0]
        r = np.empty(n)
        r[0] = 1.0 / b[0]
        for k in range(1, n):
            r[k] = -np.dot(b[1:k + 1], r[k - 1::-1]) * r[0]
        return TSeries(r)

    def __truediv__(self, other):
        if isinstance(other, TSeries):
            return self * other.recip()
        if isinstance(other, _scalar_types):
            return TSeries(self.c / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _scalar_types):
            return self.recip() * other
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        if k < 0:
            return self.recip() ** (-k)
        out = TSeries.constant(1.0, self.n)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def sqrt(self):
        a = self.c
        if a.ndim != 1:
            raise ValueError("sqrt of a batched series is undefined")
        n = a.shape[0]
        s = np.empty(n)
        s[0] = np.sqrt(a[0])
        half = 0.5 / s[0]
        for k in range(1, n):
            acc = np.dot(s[1:k], s[k - 1:0:-1]) if k > 1 else 0.0
            s[k] = (a[k] - acc) * half
        return TSeries(s)

    def eval(self, t):
        """Horner evaluation at t (scalar series -> float)."""
        out = self.c[-1]
        for k in range(self.n - 2, -1, -1):
            out = out * t + self.c[k]
        return out


class Dual:
    """First-order dual number: value ``v`` plus gradient channels ``g``.

    The payloads are generic: ``v`` a float with ``g`` an ndarray of
    channel derivatives, or ``v`` a scalar :class:`TSeries` with ``g`` a
    batched one.  Channel seeding with the columns of a matrix M turns a
    field evaluation into the product (Jacobian of field) @ M.
    """

    __slots__ = ("v", "g")

    def __init__(self, v, g):
        self.v = v
        self.g = g

    def __repr__(self):
        return f"Dual({self.v!r}, {self.g!r})"

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v + other.v, self.g + other.g)
        return Dual(self.v + other, self.g)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.v, -self.g)

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v - other.v, self.g - other.g)
        return Dual(self.v - other, self.g)

    def __rsub__(self, other):
        return Dual(other - self.v, -self.g)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v * other.v, self.v * other.g + other.v * self.g)
        return Dual(self.v * other, self.g * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            w = self.v / other.v
            return Dual(w, (self.g - w * other.g) / other.v)
        return Dual(self.v / other, self.g * (1.0 / other))

    def __rtruediv__(self, other):
        w = other / self.v
        return Dual(w, (-w / self.v) * self.g)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            return NotImplemented
        out = 1.0
        for _ in range(int(k)):
            out = self * out
        return out

    def sqrt(self):
        s = jsqrt(self.v)
        return Dual(s, self.g / (2.0 * s))


def jsqrt(x):
    """Square root dispatching on floats, series, and duals."""
    if isinstance(x, (TSeries, Dual)):
        return x.sqrt()
    return np.sqrt(x)


def lift_dual(x):
    """Wrap a float state vector in identity-seeded duals."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    return [Dual(x[i], np.eye(d)[i]) for i in range(d)]


def dual_jacobian(field, x):
    """Jacobian of ``field`` at the float state ``x`` by forward-mode AD."""
    out = field(lift_dual(x))
    d = len(x)
    jac = np.zeros((len(out), d))
    for j, fj in enumerate(out):
        if isinstance(fj, Dual):
            jac[j] = fj.g
    return jac
