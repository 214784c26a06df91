"""Regularized Hamiltonian Gamma = (1/2)|P-1|^2 |Q| (H - h) and its flow.

Gamma is built by composing the chart Hamiltonian with the inverse Belbruno
transform.  The singular Kepler term is simplified symbolically: with
pref = (1/2)|P-1|^2 |Q| = |q| and kappa the Kepler mass,

    pref * (|p|^2/2 - kappa/|q|) = (1/4)|Q| |P+1|^2 - kappa,
    pref * (q1hat p2hat - q2hat p1hat) = (1/2)|Q| (g1 (1-|P|^2) - 2 g2 P2),

with (g1, g2, g3) the polynomial position part of the inverse transform, so
no division by |q| ever occurs and Gamma is smooth at collision.  The flow
runs in fictitious time s with dt/ds = pref; the integrated state carries t
as a seventh component.

Two charts share the machinery: the Hill-rescaled problem (Kepler mass 1,
tidal term, level h-hat) and the moon-centered problem at physical scale
(Kepler mass mu, heavy-primary term, level h_m); the latter drives the
fixed-energy bridge in mu and reduces to the rotating Kepler problem at
mu = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import jsqrt
from .frames import (hill_tidal, hill_tidal_grad, earth_term, earth_term_grad)

__all__ = ["Chart", "RegState", "gamma_value", "gamma_field", "gamma_gradient",
           "time_rate", "involution", "INVOLUTION_SIGNS", "regularized_state",
           "chart_phase_point"]

# (Q1,Q2,Q3,P1,P2,P3) -> (-Q1,Q2,Q3,P1,-P2,-P3), s -> -s
INVOLUTION_SIGNS = np.array([-1.0, 1.0, 1.0, 1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Chart:
    """Which unregularized Hamiltonian Gamma wraps, and at which energy level."""

    kind: str            # "hill" (rescaled) or "moon" (physical scale)
    mu: float
    h: float             # energy level of the chart Hamiltonian
    omega: float = 1.0

    def __post_init__(self):
        if self.kind not in ("hill", "moon"):
            raise ValueError(f"unknown chart kind {self.kind!r}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mass ratio outside [0, 1]")
        if self.kind == "moon" and self.mu == 0.0:
            raise ValueError("moon chart needs mu > 0")

    @property
    def kappa(self) -> float:
        """Kepler mass of the regularized primary."""
        return 1.0 if self.kind == "hill" else self.mu

    def w(self, g1, g2, g3):
        if self.kind == "hill":
            return hill_tidal(g1, g2, g3, self.mu)
        return earth_term(g1, g2, g3, self.mu)

    def w_grad(self, g1, g2, g3):
        if self.kind == "hill":
            return hill_tidal_grad(g1, g2, g3, self.mu)
        return earth_term_grad(g1, g2, g3, self.mu)

    def with_h(self, h) -> "Chart":
        return Chart(self.kind, self.mu, float(h), self.omega)


@dataclass
class RegState:
    """Regularized phase point plus fictitious and accumulated physical time."""

    Q: np.ndarray
    P: np.ndarray
    s: float
    t: float
    h: float
    mu: float
    chart: str = "hill"

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.P = np.asarray(self.P, dtype=float)

    @property
    def x(self):
        return np.concatenate([self.Q, self.P])


def _position_terms(x):
    """Shared intermediates: hat-position (g1,g2,g3) and scalar invariants."""
    Q1, Q2, Q3, P1, P2, P3 = x[0], x[1], x[2], x[3], x[4], x[5]
    m2 = P1 * P1 + P2 * P2 + P3 * P3
    s = Q1 * P1 + Q2 * P2 + Q3 * P3
    # swapped-world position qv, then hat ordering g = (qv2, qv1, qv3)
    qv1 = 0.5 * (1.0 - m2) * Q1 + s * (P1 - 1.0)
    qv2 = 0.5 * (1.0 + m2) * Q2 - P1 * Q2 + P2 * Q1 - s * P2
    qv3 = 0.5 * (1.0 + m2) * Q3 - P1 * Q3 + P3 * Q1 - s * P3
    return m2, s, qv1, qv2, qv3


def gamma_value(chart: Chart, x):
    """Gamma at the 6-vector (Q, P); payload-generic."""
    Q1, Q2, Q3, P1, P2, P3 = x[0], x[1], x[2], x[3], x[4], x[5]
    m2, s, qv1, qv2, qv3 = _position_terms(x)
    r = jsqrt(Q1 * Q1 + Q2 * Q2 + Q3 * Q3)
    a = (P1 + 1.0) ** 2 + P2 * P2 + P3 * P3
    b = (P1 - 1.0) ** 2 + P2 * P2 + P3 * P3
    g2 = qv2 * (1.0 - m2) - 2.0 * qv1 * P2
    w = chart.w(qv2, qv1, qv3)
    return (0.25 * r * a - chart.kappa + 0.5 * chart.omega * r * g2
            + 0.5 * b * r * (w - chart.h))


def time_rate(x):
    """dt/ds = (1/2)|P - 1|^2 |Q| = |q|."""
    Q1, Q2, Q3, P1, P2, P3 = x[0], x[1], x[2], x[3], x[4], x[5]
    r = jsqrt(Q1 * Q1 + Q2 * Q2 + Q3 * Q3)
    b = (P1 - 1.0) ** 2 + P2 * P2 + P3 * P3
    return 0.5 * b * r


def _gamma_grad_terms(chart, x):
    """Gradient (dGamma/dQ, dGamma/dP) plus dt/ds, payload-generic.

    The position-Jacobian entries share many products (the transform is
    symplectic), so they are assembled from a dozen precomputed factors.
    """
    Q1, Q2, Q3, P1, P2, P3 = x[0], x[1], x[2], x[3], x[4], x[5]
    m2, s, qv1, qv2, qv3 = _position_terms(x)
    r = jsqrt(Q1 * Q1 + Q2 * Q2 + Q3 * Q3)
    inv_r = 1.0 / r
    a = (P1 + 1.0) ** 2 + P2 * P2 + P3 * P3
    b = (P1 - 1.0) ** 2 + P2 * P2 + P3 * P3
    om = chart.omega
    one_m = 1.0 - m2
    g2 = qv2 * one_m - 2.0 * qv1 * P2
    w = chart.w(qv2, qv1, qv3)
    w1, w2, w3 = chart.w_grad(qv2, qv1, qv3)   # d/d(qhat_1..3) = d/d(qv2,qv1,qv3)
    wh = w - chart.h

    p1m = P1 - 1.0
    hpm = 0.5 * (1.0 + m2) - P1
    sq1 = s - Q1
    # position Jacobian w.r.t. Q (rows dqv*) and P (rows eqv*)
    pm1 = p1m * P1
    pm2 = p1m * P2
    pm3 = p1m * P3
    p22 = P2 * P2
    p23 = P2 * P3
    p33 = P3 * P3
    dqv1 = (0.5 * one_m + pm1, pm2, pm3)
    dqv2 = (-pm2, hpm - p22, -p23)
    dqv3 = (-pm3, -p23, hpm - p33)
    e12 = Q2 * p1m - Q1 * P2
    e13 = Q3 * p1m - Q1 * P3
    e23 = Q2 * P3 - Q3 * P2
    eqv1 = (sq1, e12, e13)
    eqv2 = (e12, -sq1, e23)
    eqv3 = (e13, -e23, -sq1)

    tp2 = 2.0 * P2
    qa_coef = 0.25 * a + 0.5 * om * g2 + 0.5 * b * wh
    c_r = (0.5 * om) * r
    br = (0.5 * b) * r                      # = dt/ds
    hr = 0.5 * r
    rw = r * wh
    hw = hr + rw
    dQ, dP = [], []
    Pk = (P1, P2, P3)
    Qk = (Q1, Q2, Q3)
    for k in range(3):
        dg2 = dqv2[k] * one_m - tp2 * dqv1[k]
        dw = w1 * dqv2[k] + w2 * dqv1[k] + w3 * dqv3[k]
        dQ.append(Qk[k] * inv_r * qa_coef + c_r * dg2 + br * dw)
        eg2 = one_m * eqv2[k] - tp2 * eqv1[k] - 2.0 * Pk[k] * qv2
        if k == 1:
            eg2 = eg2 - 2.0 * qv1
        ew = w1 * eqv2[k] + w2 * eqv1[k] + w3 * eqv3[k]
        term = Pk[k] * hw + c_r * eg2 + br * ew
        if k == 0:
            term = term + (hr - rw)
        dP.append(term)
    return dQ, dP, br


def gamma_gradient(chart: Chart, x) -> np.ndarray:
    """Hand-coded gradient of Gamma at a float 6-vector."""
    dQ, dP, _ = _gamma_grad_terms(chart, x)
    return np.array(dQ + dP, dtype=float)


def gamma_field(chart: Chart):
    """Payload-generic RHS of the regularized flow, with t appended.

    State layout is (Q1, Q2, Q3, P1, P2, P3, t); returns
    (Gamma_P, -Gamma_Q, dt/ds).
    """

    def fieldfn(x):
        dQ, dP, pref = _gamma_grad_terms(chart, x)
        return [dP[0], dP[1], dP[2], -dQ[0], -dQ[1], -dQ[2], pref]

    return fieldfn


def involution(x):
    """Reversing symmetry (Q1,Q2,Q3,P1,P2,P3) -> (-Q1,Q2,Q3,P1,-P2,-P3).

    Accepts 6- or 7-vectors; a seventh (time) component is negated, matching
    s -> -s, t -> -t.
    """
    x = np.asarray(x, dtype=float)
    out = x.copy()
    out[:6] *= INVOLUTION_SIGNS
    if out.shape[0] > 6:
        out[6] = -out[6]
    return out


def regularized_state(chart: Chart, q, p, s=0.0, t=0.0) -> RegState:
    """Forward-transform a chart phase point into a RegState."""
    from .belbruno import belbruno_forward
    Q, P = belbruno_forward(q, p)
    return RegState(Q, P, s, t, chart.h, chart.mu, chart.kind)


def chart_phase_point(x):
    """Inverse-transform a regularized 6- or 7-vector to chart (q, p)."""
    from .belbruno import belbruno_inverse
    return belbruno_inverse(np.asarray(x[:3], float), np.asarray(x[3:6], float))
