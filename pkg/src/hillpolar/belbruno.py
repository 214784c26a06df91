"""Belbruno's Moebius regularizing transform between (q, p) and (Q, P).

The transform acts on the axis-swapped vectors qv = (q2hat, q1hat, q3hat),
pv = (p2hat, p1hat, p3hat): the swap makes the first component the real
axis of the A2 algebra and is kept entirely inside this module, so all
callers work with ordinary (qhat, phat) ordering.

Collisions (p -> infinity) map to P = (1, 0, 0); the point at infinity of
the momentum chart is p = (-1, 0, 0).  A useful exact identity is
|q| = (1/2) |P - 1|^2 |Q|.
"""

from __future__ import annotations

import numpy as np

__all__ = ["belbruno_forward", "belbruno_inverse", "belbruno_position",
           "BELBRUNO_COLLISION_P", "DomainError"]

BELBRUNO_COLLISION_P = np.array([1.0, 0.0, 0.0])


class DomainError(ValueError):
    """Argument sits on an excluded point of the transform."""


def _swap(v):
    return np.array([v[1], v[0], v[2]], dtype=float)


def belbruno_forward(q, p):
    """Map a phase point (q, p) to regularized coordinates (Q, P).

    Excluded: p = (0, -1, 0) in caller ordering (the chart's point at
    infinity, p_swapped = (-1, 0, 0)).
    """
    qv, pv = _swap(np.asarray(q, float)), _swap(np.asarray(p, float))
    n2 = pv @ pv
    dp = (pv[0] + 1.0) ** 2 + pv[1] ** 2 + pv[2] ** 2
    if dp == 0.0:
        raise DomainError("Belbruno forward transform at infinity (p + 1 = 0)")
    s = qv @ pv
    Q = np.array([
        0.5 * (1.0 - n2) * qv[0] + s * (pv[0] + 1.0),
        0.5 * (n2 + 1.0) * qv[1] + pv[0] * qv[1] - pv[1] * qv[0] - s * pv[1],
        0.5 * (n2 + 1.0) * qv[2] + pv[0] * qv[2] - pv[2] * qv[0] - s * pv[2],
    ])
    P = np.array([(n2 - 1.0) / dp, 2.0 * pv[1] / dp, 2.0 * pv[2] / dp])
    return Q, P


def belbruno_position(Q, P):
    """Position part of the inverse transform, in caller (qhat) ordering.

    Polynomial in (Q, P), hence defined everywhere, including the
    collision point P = (1, 0, 0) where it vanishes identically in Q.
    """
    m2 = P[0] * P[0] + P[1] * P[1] + P[2] * P[2]
    s = Q[0] * P[0] + Q[1] * P[1] + Q[2] * P[2]
    qv = [
        0.5 * (1.0 - m2) * Q[0] + s * (P[0] - 1.0),
        0.5 * (1.0 + m2) * Q[1] - P[0] * Q[1] + P[1] * Q[0] - s * P[1],
        0.5 * (1.0 + m2) * Q[2] - P[0] * Q[2] + P[2] * Q[0] - s * P[2],
    ]
    return np.array([qv[1], qv[0], qv[2]])


def belbruno_inverse(Q, P):
    """Map regularized coordinates (Q, P) back to a phase point (q, p).

    Excluded: P = (1, 0, 0), the collision point (p -> infinity).
    """
    Q = np.asarray(Q, float)
    P = np.asarray(P, float)
    dm = (P[0] - 1.0) ** 2 + P[1] ** 2 + P[2] ** 2
    if dm == 0.0:
        raise DomainError("Belbruno inverse transform at collision (P = 1)")
    m2 = P @ P
    pv = np.array([(1.0 - m2) / dm, 2.0 * P[1] / dm, 2.0 * P[2] / dm])
    q = belbruno_position(Q, P)
    return q, np.array([pv[1], pv[0], pv[2]])
