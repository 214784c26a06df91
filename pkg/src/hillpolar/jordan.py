"""The commutative, non-associative algebra A2 underlying the Belbruno transform.

Elements are z = z0 + i1 z1 + i2 z2 with multiplication fixed by
i_a i_b = -delta_ab; stored as plain length-3 float arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = ["jordan_mul", "jordan_conj", "jordan_inv", "jordan_norm2",
           "jordan_associator", "JORDAN_ONE"]

JORDAN_ONE = np.array([1.0, 0.0, 0.0])


def _as3(z):
    z = np.asarray(z, dtype=float)
    if z.shape != (3,):
        raise ValueError("A2 elements are 3-vectors (z0, z1, z2)")
    return z


def jordan_mul(x, y) -> np.ndarray:
    x, y = _as3(x), _as3(y)
    return np.array([
        x[0] * y[0] - x[1] * y[1] - x[2] * y[2],
        x[0] * y[1] + x[1] * y[0],
        x[0] * y[2] + x[2] * y[0],
    ])


def jordan_conj(z) -> np.ndarray:
    z = _as3(z)
    return np.array([z[0], -z[1], -z[2]])


def jordan_norm2(z) -> float:
    z = _as3(z)
    return float(z @ z)


def jordan_inv(z) -> np.ndarray:
    """Multiplicative inverse conj(z)/|z|^2; errors at z = 0."""
    n2 = jordan_norm2(z)
    if n2 == 0.0:
        raise ZeroDivisionError("A2 inversion at zero")
    return jordan_conj(z) / n2


def jordan_associator(x, y, z) -> np.ndarray:
    """x(yz) - (xy)z; nonzero in general since A2 is non-associative."""
    return jordan_mul(x, jordan_mul(y, z)) - jordan_mul(jordan_mul(x, y), z)
