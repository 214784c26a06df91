"""Variable-order, variable-step Taylor integration of analytic vector fields.

Fields are callables taking a sequence of payload scalars (floats, TSeries,
or Duals) and returning a sequence of the same; writing them this way lets
one implementation serve point evaluation, the Taylor recurrence, and the
variational equations (via column-seeded dual numbers).

Each accepted step stores its Taylor polynomial, giving dense output for
sampling and for locating section crossings by safeguarded Newton in the
time variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jets import TSeries, Dual

__all__ = ["IntegratorConfig", "TrajectorySample", "Trajectory",
           "IntegrationError", "SectionSearchError", "integrate",
           "integrate_with_variational", "integrate_to_section", "rk_integrate"]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class IntegratorConfig:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-14
    order_min: int = 20
    order_max: int = 30
    max_step: float = math.inf
    max_steps: int = 50000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not 4 <= self.order_min <= self.order_max <= 40:
            raise ValueError("need 4 <= order_min <= order_max <= 40")

    @property
    def order(self) -> int:
        """Work-minimizing order for the requested tolerance, clipped to range."""
        tol = min(self.abs_tol, self.rel_tol)
        n = int(math.ceil(-0.5 * math.log(tol))) + 2
        return int(np.clip(n, self.order_min, self.order_max))


DEFAULT_CONFIG = IntegratorConfig()


@dataclass
class TrajectorySample:
    s: float
    state: np.ndarray
    M: np.ndarray | None = None


class IntegrationError(RuntimeError):
    """Integration failed; carries the partial trajectory."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class SectionSearchError(RuntimeError):
    """No admissible section crossing found."""


class _Step:
    """One accepted Taylor step: polynomial coefficients on [0, h] (signed h)."""

    __slots__ = ("s0", "h", "C")

    def __init__(self, s0, h, C):
        self.s0 = s0
        self.h = h
        self.C = C

    def eval(self, tau):
        out = self.C[-1].copy()
        for k in range(self.C.shape[0] - 2, -1, -1):
            out *= tau
            out += self.C[k]
        return out

    @property
    def s1(self):
        return self.s0 + self.h


class Trajectory:
    """Piecewise-polynomial solution with samples at step boundaries."""

    def __init__(self, steps, samples):
        self.steps = steps
        self.samples = samples

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]

    def state_at(self, s):
        """Dense evaluation at time s inside the integrated span."""
        if not self.steps:
            return self.samples[0].state.copy()
        for st in self.steps:
            lo, hi = sorted((st.s0, st.s1))
            if lo - 1e-12 <= s <= hi + 1e-12:
                return st.eval(s - st.s0)
        raise ValueError(f"s={s} outside integrated span")


def _kth(v, k):
    if isinstance(v, TSeries):
        return v.c[k] if k < v.n else 0.0
    return float(v) if k == 0 else 0.0


def _taylor_coeffs(fieldfn, x0, order):
    d = x0.shape[0]
    C = np.zeros((order + 1, d))
    C[0] = x0
    for k in range(order):
        xs = [TSeries(C[:k + 1, i].copy()) for i in range(d)]
        f = fieldfn(xs)
        inv = 1.0 / (k + 1)
        for i in range(d):
            C[k + 1, i] = _kth(f[i], k) * inv
    return C


def _step_size(C, x0, cfg):
    """Two-term tail estimate on the last Taylor coefficients.

    C may be the state series (n+1, d) or the variational series; the
    tolerance is scaled by the magnitude of the quantity being propagated.
    """
    tol = cfg.abs_tol + cfg.rel_tol * float(np.max(np.abs(x0)))
    n = C.shape[0] - 1
    h = cfg.max_step
    for m in (n - 1, n):
        ym = float(np.max(np.abs(C[m])))
        if ym > 0.0:
            h = min(h, (tol / ym) ** (1.0 / m))
    return 0.9 * h


def _variational_series(fieldfn, C, M0):
    """Series of M(tau) solving M' = Jf(x(tau)) M, M(0) = M0."""
    n1, d = C.shape
    xs = []
    for i in range(d):
        g = np.zeros((n1, d))
        g[0, i] = 1.0
        xs.append(Dual(TSeries(C[:, i].copy()), TSeries(g)))
    f = fieldfn(xs)
    A = np.zeros((n1, d, d))
    for j in range(d):
        if isinstance(f[j], Dual):
            A[:, j, :] = f[j].g.c
    M = np.zeros((n1 + 1, d, d))
    M[0] = M0
    for k in range(n1):
        M[k + 1] = np.einsum("kab,kbc->ac", A[:k + 1], M[k::-1]) / (k + 1)
    return M


def _poly_eval(C, tau):
    out = C[-1].copy()
    for k in range(C.shape[0] - 2, -1, -1):
        out = out * tau + C[k]
    return out


def _march(fieldfn, x0, span, cfg, M0=None, step_hook=None):
    """Common stepping loop; returns (trajectory, final M or None)."""
    s0, s1 = float(span[0]), float(span[1])
    x = np.asarray(x0, dtype=float).copy()
    M = None if M0 is None else np.asarray(M0, dtype=float).copy()
    sgn = 1.0 if s1 >= s0 else -1.0
    order = cfg.order
    steps = []
    samples = [TrajectorySample(s0, x.copy(), None if M is None else M.copy())]
    s = s0
    traj = Trajectory(steps, samples)
    if s1 == s0:
        return traj, M
    for _ in range(cfg.max_steps):
        try:
            C = _taylor_coeffs(fieldfn, x, order)
            # per-step transition factor, composed below: keeps the error
            # relative to each O(1) factor instead of the growing M
            Mser = None if M is None else _variational_series(fieldfn, C, np.eye(len(x)))
        except (ZeroDivisionError, FloatingPointError, ValueError) as exc:
            raise IntegrationError(f"field evaluation failed: {exc}", traj) from exc
        h = _step_size(C, x, cfg)
        if Mser is not None:
            # the variational series can be stiffer than the state's near
            # degeneracies; respect its tail too
            h = min(h, _step_size(Mser.reshape(Mser.shape[0], -1), 1.0, cfg))
        remaining = s1 - s
        h = min(h, abs(remaining))          # a constant field gives h = inf
        if not np.isfinite(h) or h <= 16.0 * _EPS * max(abs(s), 1.0):
            raise IntegrationError(f"step size underflow at s={s}", traj)
        h_signed = sgn * h
        step = _Step(s, h_signed, C)
        x = step.eval(h_signed)
        if Mser is not None:
            M = _poly_eval(Mser, h_signed) @ M
        s = s + h_signed
        steps.append(step)
        samples.append(TrajectorySample(s, x.copy(), None if M is None else M.copy()))
        if step_hook is not None:
            res = step_hook(step, samples[-2].state, x)
            if res is not None:
                return traj, M
        if abs(s1 - s) <= 16.0 * _EPS * max(abs(s1), 1.0):
            samples[-1].s = s1
            return traj, M
    raise IntegrationError(f"max_steps={cfg.max_steps} exceeded", traj)


def integrate(fieldfn, x0, span, config=None) -> Trajectory:
    """Integrate over span=(s0, s1); backward integration when s1 < s0."""
    cfg = config or DEFAULT_CONFIG
    traj, _ = _march(fieldfn, x0, span, cfg)
    return traj


def integrate_with_variational(fieldfn, x0, M0, span, config=None):
    """Integrate the state together with the variational matrix.

    Returns (final_state, final_M, trajectory); M solves M' = Jf(x) M along
    the trajectory with M(s0) = M0, the Jacobian obtained by column-seeded
    dual evaluation of the field at each step's Taylor polynomial.
    """
    cfg = config or DEFAULT_CONFIG
    traj, M = _march(fieldfn, x0, span, cfg, M0=M0)
    return traj.final.state, M, traj


def _refine_crossing(step, gfn, glo, ghi):
    """Safeguarded Newton for g(x(tau)) = 0 inside one step."""
    a, b = 0.0, step.h
    ga, gb = glo, ghi
    tau = a - ga * (b - a) / (gb - ga)
    delta = 1e-7 * max(abs(step.h), 1e-30)
    for _ in range(80):
        gt = gfn(step.eval(tau))
        if abs(gt) <= 1e-13:
            break
        if (ga < 0) == (gt < 0):
            a, ga = tau, gt
        else:
            b, gb = tau, gt
        dg = (gfn(step.eval(tau + delta)) - gfn(step.eval(tau - delta))) / (2 * delta)
        t_new = tau - gt / dg if dg != 0.0 else 0.5 * (a + b)
        lo, hi = sorted((a, b))
        if not lo < t_new < hi:
            t_new = 0.5 * (a + b)
        if abs(t_new - tau) <= 4.0 * _EPS * max(abs(tau), abs(step.h)):
            tau = t_new
            break
        tau = t_new
    return tau


def integrate_to_section(fieldfn, x0, section, direction=0, config=None,
                         s_max=math.inf, s0=0.0):
    """March until section(state) crosses zero in the given direction.

    direction +1 requires an increasing crossing, -1 decreasing, 0 either.
    Returns (state_at_crossing, s_elapsed).  The crossing is polished on the
    step's dense polynomial to |section| <= 1e-12.
    """
    cfg = config or DEFAULT_CONFIG
    hit = {}

    def hook(step, x_before, x_after):
        g0 = section(x_before)
        g1 = section(x_after)
        crossing = (g0 > 0.0 >= g1) if direction < 0 else \
                   (g0 < 0.0 <= g1) if direction > 0 else \
                   (g0 != 0.0 and (g0 > 0.0) != (g1 > 0.0))
        if not crossing:
            return None
        tau = _refine_crossing(step, section, g0, g1)
        hit["state"] = step.eval(tau)
        hit["s"] = step.s0 + tau
        return True

    sgn_span = s_max if math.isfinite(s_max) else s0 + 1e9
    try:
        _march(fieldfn, x0, (s0, sgn_span), cfg, step_hook=hook)
    except IntegrationError as exc:
        if not hit:
            raise SectionSearchError(f"no section crossing: {exc}") from exc
    if not hit:
        raise SectionSearchError("no section crossing found within bounds")
    return hit["state"], hit["s"] - s0


def rk_integrate(fieldfn, x0, span, rtol=1e-12, atol=1e-12):
    """Cross-validation fallback: embedded 8th-order Runge-Kutta (DOP853)."""
    from scipy.integrate import solve_ivp

    def fun(_, y):
        return np.array(fieldfn(y), dtype=float)

    sol = solve_ivp(fun, span, np.asarray(x0, float), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise IntegrationError(f"DOP853 failed: {sol.message}")
    return sol.y[:, -1]
