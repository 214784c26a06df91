"""Construction and Newton refinement of symmetric polar periodic orbits.

The mu = 0 consecutive collision orbit on the z-axis is known in closed
form up to 1-D quadrature; it seeds Newton shooting on the symmetric
surface of section {Q1 = P2 = P3 = 0} of the regularized flow.  Unknowns
are (S, Q2(0), P1(0)) with Q3 eliminated on the energy level at every
iterate; the residual is (Q1, P2, P3) at fictitious time S/2, and the
shooting Jacobian determinant is the orbit's non-degeneracy measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np
from scipy.integrate import quad

from .belbruno import belbruno_position, belbruno_inverse
from .gamma import (Chart, RegState, gamma_value, gamma_gradient, gamma_field,
                    time_rate, involution)
from .integrator import (IntegratorConfig, integrate_with_variational,
                         integrate_to_section, IntegrationError)

__all__ = ["SectionPoint", "OrbitRecord", "ConvergenceError", "RootFailure",
           "amplitude", "collision_period", "hill_axis_potential",
           "collision_seed", "solve_Q3", "section_state", "find_polar_orbit",
           "dense_orbit", "DenseSample", "DEGENERACY_WARN_TOL"]

DEGENERACY_WARN_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """Newton shooting failed to converge."""


class RootFailure(RuntimeError):
    """Scalar root solve (Q3 elimination) failed."""


@dataclass
class SectionPoint:
    """Free section coordinates (Q2, P1) plus the eliminated Q3."""

    Q2: float
    P1: float
    Q3: float
    h: float
    mu: float
    chart: str = "hill"


@dataclass
class OrbitRecord:
    """A converged symmetric periodic orbit of the regularized flow."""

    section_point: SectionPoint
    half_period_s: float
    period_t: float
    delta: float
    residual: float
    amplitude: float
    periapsis: float
    apoapsis: float
    h: float
    mu: float
    chart: str = "hill"
    iterations: int = 0
    warnings: list = dfield(default_factory=list)
    spectrum: object = None          # filled lazily by stability
    half_variational: np.ndarray | None = None
    trajectory: object = None

    @property
    def period_s(self) -> float:
        return 2.0 * self.half_period_s


# -- mu = 0 axis orbit: amplitude and period --------------------------------

def hill_axis_potential(z):
    """Hill's lunar potential restricted to the z-axis: V(z) = -1/z + z^2/2."""
    return -1.0 / z + 0.5 * z * z


def amplitude(h: float) -> float:
    """Positive solution d(h) of V(z) = h, i.e. of z^3 - 2 h z - 2 = 0."""
    roots = np.roots([1.0, 0.0, -2.0 * h, -2.0])
    real = roots[np.abs(roots.imag) < 1e-8].real
    d = float(real[real > 0.0][0])
    for _ in range(4):                      # polish on V(z) - h (V' > 0)
        d -= (hill_axis_potential(d) - h) / (1.0 / (d * d) + d)
    return d


def collision_period(h: float) -> float:
    """Physical period of the mu = 0 consecutive collision orbit.

    T* = 2 int_0^d dz / sqrt(2h + 2/z - z^2), evaluated after z = d sin^2
    theta which removes both endpoint singularities.
    """
    d = amplitude(h)

    def integrand(theta):
        st = math.sin(theta)
        z = d * st * st
        if z == 0.0:
            return 0.0
        speed2 = 2.0 * h + 2.0 / z - z * z
        return 2.0 * d * st * math.cos(theta) / math.sqrt(speed2)

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=1e-13, epsrel=1e-13,
                  limit=200)
    return 2.0 * val


# -- section machinery -------------------------------------------------------

def section_state(Q2, P1, Q3):
    """Regularized 7-vector (Q, P, t) on the symmetric section."""
    return np.array([0.0, Q2, Q3, P1, 0.0, 0.0, 0.0])


def solve_Q3(Q2, P1, h, mu, Q3_guess, chart="hill", tol=1e-13, max_iter=60):
    """Eliminate Q3 on the level set: Gamma(0,Q2,Q3,P1,0,0) = 0 by safeguarded Newton."""
    ch = chart if isinstance(chart, Chart) else Chart(chart, mu, h)
    q3 = float(Q3_guess)
    width = max(abs(q3), 0.5)
    for _ in range(max_iter):
        x = section_state(Q2, P1, q3)[:6]
        f = gamma_value(ch, x)
        if abs(f) <= tol:
            return q3
        df = gamma_gradient(ch, x)[2]
        if df == 0.0:
            break
        step = f / df
        if abs(step) > width:                       # keep Newton local
            step = math.copysign(width, step)
        q3 -= step
    x = section_state(Q2, P1, q3)[:6]
    if abs(gamma_value(ch, x)) <= 10 * tol:
        return q3
    raise RootFailure(
        f"Q3 elimination stalled at Q2={Q2:.6g}, P1={P1:.6g}, h={h:.6g}, "
        f"mu={mu:.3g}: residual {gamma_value(ch, x):.3e}")


def collision_seed(h, mu=0.0, chart="hill", config=None):
    """Section point of the collision orbit plus a half-period guess.

    The point (Q2, P1) = (0, 1) with Q3 = -kappa is the exact orbit when
    the z-axis is invariant (mu = 0 in the Hill chart, mu = 1 in either);
    otherwise it seeds Newton.  The half-period guess comes from one
    forward integration to the next section crossing (P3 = 0 from above).
    """
    ch = chart if isinstance(chart, Chart) else Chart(chart, mu, h)
    q3 = -ch.kappa
    x0 = section_state(0.0, 1.0, q3)
    fieldfn = gamma_field(ch)
    cfg = config or IntegratorConfig()
    _, s_half = integrate_to_section(fieldfn, x0, lambda x: x[5], direction=-1,
                                     config=cfg, s_max=200.0)
    reg = RegState(x0[:3], x0[3:6], 0.0, 0.0, h, ch.mu, ch.kind)
    return reg, s_half


def _shoot(ch, fieldfn, S, Q2, P1, Q3, cfg):
    """Residual, Jacobian, and endpoint data for the half-period shot."""
    x0 = section_state(Q2, P1, Q3)
    xf, M, traj = integrate_with_variational(fieldfn, x0, np.eye(7), (0.0, 0.5 * S), cfg)
    F = np.array([xf[0], xf[4], xf[5]])
    fS = np.asarray(fieldfn(xf), dtype=float)
    g = gamma_gradient(ch, x0[:6])
    vQ2 = np.zeros(6)
    vQ2[1] = 1.0
    vQ2[2] = -g[1] / g[2]
    vP1 = np.zeros(6)
    vP1[3] = 1.0
    vP1[2] = -g[3] / g[2]
    M6 = M[:6, :6]
    J = np.column_stack([0.5 * fS[[0, 4, 5]], (M6 @ vQ2)[[0, 4, 5]],
                         (M6 @ vP1)[[0, 4, 5]]])
    return F, J, xf, M6, traj


def _orbit_extents(traj):
    """(periapsis, apoapsis) of |q| = dt/ds over the half-period trajectory."""
    svals = []
    for st in traj.steps:
        svals.extend(np.linspace(st.s0, st.s1, 12, endpoint=False))
    svals.append(traj.steps[-1].s1)
    svals = np.array(svals)
    radii = np.array([time_rate(traj.state_at(s)) for s in svals])

    def refine(idx, pick):
        if idx == 0 or idx == len(svals) - 1:
            return radii[idx]
        s3 = svals[idx - 1:idx + 2]
        r3 = radii[idx - 1:idx + 2]
        denom = (s3[0] - s3[1]) * (s3[0] - s3[2]) * (s3[1] - s3[2])
        if denom == 0.0:
            return radii[idx]
        a = (s3[2] * (r3[1] - r3[0]) + s3[1] * (r3[0] - r3[2])
             + s3[0] * (r3[2] - r3[1])) / denom
        if a == 0.0:
            return radii[idx]
        b = (s3[2] ** 2 * (r3[0] - r3[1]) + s3[1] ** 2 * (r3[2] - r3[0])
             + s3[0] ** 2 * (r3[1] - r3[2])) / denom
        s_ext = -b / (2.0 * a)
        lo, hi = min(s3[0], s3[2]), max(s3[0], s3[2])
        if not lo <= s_ext <= hi:
            return radii[idx]
        return pick(radii[idx], time_rate(traj.state_at(s_ext)))

    return (refine(int(np.argmin(radii)), min), refine(int(np.argmax(radii)), max))


def find_polar_orbit(h, mu, initial=None, chart="hill", config=None,
                     tol=1e-10, max_iter=25) -> OrbitRecord:
    """Newton-refine a symmetric periodic orbit at energy h and mass ratio mu.

    ``initial`` may be an OrbitRecord, a (SectionPoint, S_half) pair as
    returned by :func:`collision_seed`, a tuple (S, Q2, P1, Q3), or None to
    start from the collision seed.  Near-degenerate shots (|det J| below
    DEGENERACY_WARN_TOL) attach a warning instead of failing.
    """
    ch = chart if isinstance(chart, Chart) else Chart(chart, mu, h)
    cfg = config or IntegratorConfig()
    fieldfn = gamma_field(ch)

    if initial is None:
        reg, s_half = collision_seed(h, mu, ch, cfg)
        S, Q2, P1, Q3 = 2.0 * s_half, reg.Q[1], reg.P[0], reg.Q[2]
    elif isinstance(initial, OrbitRecord):
        sp = initial.section_point
        S, Q2, P1, Q3 = initial.period_s, sp.Q2, sp.P1, sp.Q3
    elif isinstance(initial, tuple) and isinstance(initial[0], (RegState, SectionPoint)):
        pt, s_half = initial
        S = 2.0 * s_half
        if isinstance(pt, RegState):
            Q2, P1, Q3 = pt.Q[1], pt.P[0], pt.Q[2]
        else:
            Q2, P1, Q3 = pt.Q2, pt.P1, pt.Q3
    else:
        S, Q2, P1, Q3 = initial

    warnings = []
    F = J = xf = M6 = traj = None
    pending = None
    for it in range(max_iter + 1):
        if pending is None:
            Q3 = solve_Q3(Q2, P1, h, mu, Q3, ch)
            F, J, xf, M6, traj = _shoot(ch, fieldfn, S, Q2, P1, Q3, cfg)
        else:
            Q3, (F, J, xf, M6, traj) = pending
            pending = None
        res = float(np.max(np.abs(F)))
        if res <= tol:
            break
        if it == max_iter:
            raise ConvergenceError(
                f"shooting stalled at h={h:.6g}, mu={mu:.3g}: residual {res:.3e}")
        try:
            delta_u = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            delta_u, *_ = np.linalg.lstsq(J, -F, rcond=None)
            warnings.append("singular shooting Jacobian; least-squares step")
        # damped update: keep the residual from growing wildly
        scale = 1.0
        for _ in range(5):
            S_n, Q2_n, P1_n = (S + scale * delta_u[0], Q2 + scale * delta_u[1],
                               P1 + scale * delta_u[2])
            if S_n > 0:
                try:
                    Q3_n = solve_Q3(Q2_n, P1_n, h, mu, Q3, ch)
                    shot = _shoot(ch, fieldfn, S_n, Q2_n, P1_n, Q3_n, cfg)
                    if np.max(np.abs(shot[0])) < 10.0 * res:
                        pending = (Q3_n, shot)
                        break
                except (RootFailure, IntegrationError):
                    pass
            scale *= 0.5
        S, Q2, P1 = S + scale * delta_u[0], Q2 + scale * delta_u[1], P1 + scale * delta_u[2]

    delta = float(np.linalg.det(J))
    if abs(delta) < DEGENERACY_WARN_TOL:
        warnings.append(f"near-degenerate orbit: |Delta| = {abs(delta):.3e}")
    peri, apo = _orbit_extents(traj)
    rec = OrbitRecord(
        section_point=SectionPoint(Q2, P1, Q3, h, ch.mu, ch.kind),
        half_period_s=0.5 * S,
        period_t=2.0 * float(xf[6]),
        delta=delta,
        residual=float(np.max(np.abs(F))),
        amplitude=apo,
        periapsis=peri,
        apoapsis=apo,
        h=h, mu=ch.mu, chart=ch.kind,
        iterations=it,
        warnings=warnings,
        half_variational=M6,
        trajectory=traj,
    )
    return rec


@dataclass
class DenseSample:
    s: float
    t: float
    q: np.ndarray
    p: np.ndarray


def dense_orbit(record: OrbitRecord, n_samples: int, frame="chart") -> list:
    """Sample the full periodic orbit uniformly in fictitious time.

    The second half period is generated from the first by the reversing
    symmetry, so the output is exactly symmetric.  ``frame`` is "chart"
    (the solver's own chart coordinates), "regularized", "moon_centered",
    or "barycentric"; momenta at collision points come out infinite.
    """
    traj = record.trajectory
    if traj is None:
        raise ValueError("record carries no trajectory; re-solve the orbit")
    sigma = record.half_period_s
    T = record.period_t
    out = []
    for s in np.linspace(0.0, 2.0 * sigma, n_samples):
        if s <= sigma:
            x = traj.state_at(s)
        else:
            x = involution(traj.state_at(2.0 * sigma - s))
            x[6] = T + x[6]          # involution negated the time component
        out.append(_to_frame(record, s, x, frame))
    return out


def _to_frame(record, s, x, frame):
    t = float(x[6])
    if frame == "regularized":
        return DenseSample(s, t, x[:3].copy(), x[3:6].copy())
    qhat = belbruno_position(x[:3], x[3:6])
    b = (x[3] - 1.0) ** 2 + x[4] ** 2 + x[5] ** 2
    if b > 1e-24:
        _, phat = belbruno_inverse(x[:3], x[3:6])
    else:
        phat = np.full(3, np.inf)
    if frame == "chart":
        return DenseSample(s, t, qhat, phat)
    if record.chart == "hill":
        scale = record.mu ** (1.0 / 3.0)
        if record.mu <= 0.0 and frame != "chart":
            raise ValueError("mu = 0 orbits exist only in the rescaled chart")
        q_m, p_m = scale * qhat, scale * phat
    else:
        q_m, p_m = qhat, phat
    if frame == "moon_centered":
        return DenseSample(s, t, q_m, p_m)
    if frame == "barycentric":
        mu = record.mu
        return DenseSample(s, t, q_m + np.array([1.0 - mu, 0.0, 0.0]),
                           p_m - np.array([0.0, 1.0 - mu, 0.0]))
    raise ValueError(f"unknown frame {frame!r}")
