"""Hamiltonians, vector fields, and frame conversions for the lunar problem.

Three frames are supported:

* barycentric rotating frame of the restricted three-body problem,
* moon-centered translated frame (light primary at the origin),
* Hill-rescaled frame (coordinates magnified by mu^(-1/3) about the light
  primary; the mu -> 0 limit is Hill's lunar problem).

All Hamiltonians and their gradients are hand-coded and written generically
over the numeric payload, so the same expressions evaluate on floats, Taylor
series, and dual numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .jets import Dual, jsqrt

__all__ = [
    "FrameTag", "Frame", "PhaseState", "EnergyValue",
    "CollisionError", "ParameterError",
    "eval_energy", "vector_field", "variational_field", "frame_field",
    "to_moon_centered", "to_barycentric", "rescale_hill", "unscale_hill",
    "moon_energy_from_barycentric", "barycentric_energy_from_moon",
    "hill_energy_from_moon", "moon_energy_from_hill",
    "to_physical_km", "hill_critical_value", "hill_critical_points",
    "hill_tidal", "hill_tidal_grad", "earth_term", "earth_term_grad",
]


class CollisionError(ValueError):
    """State sits on a gravitational singularity; names the body."""

    def __init__(self, body):
        super().__init__(f"collision with {body}: zero denominator in potential")
        self.body = body


class ParameterError(ValueError):
    """Operation undefined for the supplied frame parameters."""


class FrameTag(str, Enum):
    BARYCENTRIC = "barycentric"
    MOON_CENTERED = "moon_centered"
    HILL_RESCALED = "hill_rescaled"


@dataclass(frozen=True)
class Frame:
    """Frame identifier: tag, mass ratio mu, rotation frequency omega."""

    tag: FrameTag
    mu: float
    omega: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ParameterError(f"mass ratio mu={self.mu} outside [0, 1]")


@dataclass
class PhaseState:
    """Position/momentum pair tagged with its frame."""

    q: np.ndarray
    p: np.ndarray
    frame: Frame

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.q.shape != (3,) or self.p.shape != (3,):
            raise ParameterError("q and p must be 3-vectors")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise ParameterError("non-finite phase state")

    @property
    def x(self):
        return np.concatenate([self.q, self.p])


@dataclass(frozen=True)
class EnergyValue:
    """Hamiltonian value h in a given frame (convention: E = h)."""

    value: float
    frame: Frame


# -- potential terms -------------------------------------------------------

def hill_tidal(q1, q2, q3, mu):
    """Rotational/tidal part of the rescaled Hamiltonian beyond the Kepler term.

    Cancellation-stable form of -(1-mu)/mu^(2/3) * (1/sqrt(1+x) - 1 +
    mu^(1/3) q1) with x = 2 mu^(1/3) q1 + mu^(2/3) |q|^2; the mu^(2/3)
    factor is taken out exactly, so the expression is accurate uniformly in
    mu and reduces to |q|^2/2 - (3/2) q1^2 at mu = 0.
    """
    c = mu ** (1.0 / 3.0)
    rho2 = q1 * q1 + q2 * q2 + q3 * q3
    xt = 2.0 * q1 + c * rho2
    u = jsqrt(1.0 + c * xt)
    a_fac = (2.0 + u) / (u * (1.0 + u) ** 2)
    b_fac = 1.0 / (u * (1.0 + u))
    return -(1.0 - mu) * (q1 * xt * a_fac - rho2 * b_fac)


def hill_tidal_grad(q1, q2, q3, mu):
    """Gradient of :func:`hill_tidal` with respect to (q1, q2, q3)."""
    c = mu ** (1.0 / 3.0)
    q = (q1, q2, q3)
    rho2 = q1 * q1 + q2 * q2 + q3 * q3
    xt = 2.0 * q1 + c * rho2
    u = jsqrt(1.0 + c * xt)
    inv_u = 1.0 / u
    inv_1u = 1.0 / (1.0 + u)
    a_fac = (2.0 + u) * inv_u * inv_1u * inv_1u
    b_fac = inv_u * inv_1u
    # d/dx of the two factors, via logarithmic derivatives and u' = 1/(2u)
    da = a_fac * 0.5 * inv_u * (1.0 / (2.0 + u) - inv_u - 2.0 * inv_1u)
    db = -b_fac * 0.5 * inv_u * (inv_u + inv_1u)
    out = []
    for k in range(3):
        dxt = (2.0 if k == 0 else 0.0) + 2.0 * c * q[k]
        dx = c * dxt
        term = q1 * dxt * a_fac + q1 * xt * da * dx - 2.0 * q[k] * b_fac - rho2 * db * dx
        if k == 0:
            term = term + xt * a_fac
        out.append(-(1.0 - mu) * term)
    return out


def earth_term(q1, q2, q3, mu):
    """Heavy-primary potential -(1-mu)(1/|q+e1| + q1) in moon-centered coordinates."""
    rho = jsqrt((q1 + 1.0) ** 2 + q2 * q2 + q3 * q3)
    return -(1.0 - mu) * (1.0 / rho + q1)


def earth_term_grad(q1, q2, q3, mu):
    rho2 = (q1 + 1.0) ** 2 + q2 * q2 + q3 * q3
    inv_rho3 = 1.0 / (rho2 * jsqrt(rho2))
    return [
        -(1.0 - mu) * (1.0 - (q1 + 1.0) * inv_rho3),
        (1.0 - mu) * q2 * inv_rho3,
        (1.0 - mu) * q3 * inv_rho3,
    ]


# -- Hamiltonians and fields (payload-generic internals) -------------------

def _ham_barycentric(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    rm = jsqrt((q1 - (1.0 - mu)) ** 2 + q2 * q2 + q3 * q3)
    re = jsqrt((q1 + mu) ** 2 + q2 * q2 + q3 * q3)
    return (0.5 * (p1 * p1 + p2 * p2 + p3 * p3) - mu / rm - (1.0 - mu) / re
            + omega * (q1 * p2 - q2 * p1))


def _rhs_barycentric(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    dm1 = q1 - (1.0 - mu)
    de1 = q1 + mu
    rm2 = dm1 * dm1 + q2 * q2 + q3 * q3
    re2 = de1 * de1 + q2 * q2 + q3 * q3
    am = mu / (rm2 * jsqrt(rm2))
    ae = (1.0 - mu) / (re2 * jsqrt(re2))
    hq1 = am * dm1 + ae * de1 + omega * p2
    hq2 = am * q2 + ae * q2 - omega * p1
    hq3 = am * q3 + ae * q3
    return [p1 - omega * q2, p2 + omega * q1, p3, -hq1, -hq2, -hq3]


def _ham_moon(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    r = jsqrt(q1 * q1 + q2 * q2 + q3 * q3)
    return (0.5 * (p1 * p1 + p2 * p2 + p3 * p3) - mu / r
            + omega * (q1 * p2 - q2 * p1) + earth_term(q1, q2, q3, mu))


def _rhs_moon(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    r2 = q1 * q1 + q2 * q2 + q3 * q3
    a = mu / (r2 * jsqrt(r2))
    w1, w2, w3 = earth_term_grad(q1, q2, q3, mu)
    return [p1 - omega * q2, p2 + omega * q1, p3,
            -(a * q1 + omega * p2 + w1),
            -(a * q2 - omega * p1 + w2),
            -(a * q3 + w3)]


def _ham_hill(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    r = jsqrt(q1 * q1 + q2 * q2 + q3 * q3)
    return (0.5 * (p1 * p1 + p2 * p2 + p3 * p3) - 1.0 / r
            + omega * (q1 * p2 - q2 * p1) + hill_tidal(q1, q2, q3, mu))


def _rhs_hill(x, mu, omega):
    q1, q2, q3, p1, p2, p3 = x
    r2 = q1 * q1 + q2 * q2 + q3 * q3
    a = 1.0 / (r2 * jsqrt(r2))
    w1, w2, w3 = hill_tidal_grad(q1, q2, q3, mu)
    return [p1 - omega * q2, p2 + omega * q1, p3,
            -(a * q1 + omega * p2 + w1),
            -(a * q2 - omega * p1 + w2),
            -(a * q3 + w3)]


_HAMS = {
    FrameTag.BARYCENTRIC: _ham_barycentric,
    FrameTag.MOON_CENTERED: _ham_moon,
    FrameTag.HILL_RESCALED: _ham_hill,
}
_RHS = {
    FrameTag.BARYCENTRIC: _rhs_barycentric,
    FrameTag.MOON_CENTERED: _rhs_moon,
    FrameTag.HILL_RESCALED: _rhs_hill,
}


def _check_collisions(state):
    q, mu = state.q, state.frame.mu
    tag = state.frame.tag
    if tag == FrameTag.BARYCENTRIC:
        if np.linalg.norm(q - np.array([1.0 - mu, 0.0, 0.0])) == 0.0:
            raise CollisionError("moon")
        if np.linalg.norm(q + np.array([mu, 0.0, 0.0])) == 0.0:
            raise CollisionError("earth")
    else:
        if np.linalg.norm(q) == 0.0:
            raise CollisionError("moon")
        if tag == FrameTag.MOON_CENTERED and \
                np.linalg.norm(q + np.array([1.0, 0.0, 0.0])) == 0.0:
            raise CollisionError("earth")


def eval_energy(state: PhaseState) -> float:
    """Hamiltonian value in the state's frame (E = h convention)."""
    _check_collisions(state)
    f = state.frame
    return float(_HAMS[f.tag](state.x, f.mu, f.omega))


def frame_field(frame: Frame):
    """Payload-generic right-hand side (qdot, pdot) for the frame's flow."""
    rhs = _RHS[frame.tag]
    mu, omega = frame.mu, frame.omega

    def fieldfn(x):
        return rhs(x, mu, omega)

    return fieldfn


def vector_field(state: PhaseState) -> np.ndarray:
    """Hamiltonian vector field (qdot, pdot) at the state; analytic gradients."""
    _check_collisions(state)
    f = state.frame
    return np.array(_RHS[f.tag](state.x, f.mu, f.omega), dtype=float)


def variational_field(state: PhaseState, M: np.ndarray) -> np.ndarray:
    """Right-hand side J Hess(H) M of the first-order variational equations."""
    M = np.asarray(M, dtype=float)
    _check_collisions(state)
    f = state.frame
    rhs = _RHS[f.tag]
    x = state.x
    duals = [Dual(x[i], M[i, :].copy()) for i in range(6)]
    out = rhs(duals, f.mu, f.omega)
    return np.array([fi.g for fi in out])


# -- frame conversions ------------------------------------------------------

def to_moon_centered(state: PhaseState) -> PhaseState:
    """Translate the barycentric frame so the light primary sits at the origin.

    The symplectic translation is q1' = q1 - (1-mu), p2' = p2 + (1-mu); the
    induced Hamiltonian is shifted by +(1-mu)^2/2 so that H_m = H + (1-mu)^2/2.
    """
    if state.frame.tag != FrameTag.BARYCENTRIC:
        raise ParameterError("to_moon_centered expects a barycentric state")
    mu = state.frame.mu
    q = state.q - np.array([1.0 - mu, 0.0, 0.0])
    p = state.p + np.array([0.0, 1.0 - mu, 0.0])
    return PhaseState(q, p, Frame(FrameTag.MOON_CENTERED, mu, state.frame.omega))


def to_barycentric(state: PhaseState) -> PhaseState:
    if state.frame.tag != FrameTag.MOON_CENTERED:
        raise ParameterError("to_barycentric expects a moon-centered state")
    mu = state.frame.mu
    q = state.q + np.array([1.0 - mu, 0.0, 0.0])
    p = state.p - np.array([0.0, 1.0 - mu, 0.0])
    return PhaseState(q, p, Frame(FrameTag.BARYCENTRIC, mu, state.frame.omega))


def rescale_hill(state: PhaseState) -> PhaseState:
    """Magnify moon-centered coordinates by mu^(-1/3) (conformal factor mu^(2/3))."""
    if state.frame.tag != FrameTag.MOON_CENTERED:
        raise ParameterError("rescale_hill expects a moon-centered state")
    mu = state.frame.mu
    if mu <= 0.0:
        raise ParameterError("rescaling undefined for mu = 0")
    s = mu ** (-1.0 / 3.0)
    return PhaseState(s * state.q, s * state.p,
                      Frame(FrameTag.HILL_RESCALED, mu, state.frame.omega))


def unscale_hill(state: PhaseState) -> PhaseState:
    if state.frame.tag != FrameTag.HILL_RESCALED:
        raise ParameterError("unscale_hill expects a Hill-rescaled state")
    mu = state.frame.mu
    if mu <= 0.0:
        raise ParameterError("unscaling undefined for mu = 0")
    s = mu ** (1.0 / 3.0)
    return PhaseState(s * state.q, s * state.p,
                      Frame(FrameTag.MOON_CENTERED, mu, state.frame.omega))


# -- energy bookkeeping -----------------------------------------------------

def moon_energy_from_barycentric(h: float, mu: float) -> float:
    return h + 0.5 * (1.0 - mu) ** 2


def barycentric_energy_from_moon(h_m: float, mu: float) -> float:
    return h_m - 0.5 * (1.0 - mu) ** 2


def hill_energy_from_moon(h_m: float, mu: float) -> float:
    if mu <= 0.0:
        raise ParameterError("energy rescaling undefined for mu = 0")
    return mu ** (-2.0 / 3.0) * (h_m + 1.0 - mu)


def moon_energy_from_hill(h_hat: float, mu: float) -> float:
    if mu <= 0.0:
        raise ParameterError("energy rescaling undefined for mu = 0")
    return mu ** (2.0 / 3.0) * h_hat - (1.0 - mu)


def to_physical_km(state: PhaseState, distance_km: float) -> float:
    """Distance to the light primary's center in km, given the primary separation."""
    tag = state.frame.tag
    if tag == FrameTag.MOON_CENTERED:
        r = np.linalg.norm(state.q)
    elif tag == FrameTag.HILL_RESCALED:
        r = state.frame.mu ** (1.0 / 3.0) * np.linalg.norm(state.q)
    else:
        raise ParameterError("to_physical_km expects moon-centered or Hill-rescaled")
    return float(r * distance_km)


# -- Hill critical data ------------------------------------------------------

def hill_critical_value() -> float:
    """Energy of the two Lagrange-type equilibria of Hill's lunar problem."""
    return -0.5 * 3.0 ** (4.0 / 3.0)


def hill_critical_points():
    """The two equilibria of Hill's lunar problem (mu = 0, rescaled frame)."""
    a = 3.0 ** (-1.0 / 3.0)
    fr = Frame(FrameTag.HILL_RESCALED, 0.0)
    return (
        PhaseState([a, 0.0, 0.0], [0.0, -a, 0.0], fr),
        PhaseState([-a, 0.0, 0.0], [0.0, a, 0.0], fr),
    )
