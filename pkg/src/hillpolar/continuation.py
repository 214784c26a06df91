"""Family tracing in energy and in mass ratio, with bifurcation detection.

Natural-parameter continuation with adaptive steps: the predictor is linear
extrapolation of (S, Q2, P1, Q3) in the parameter, the corrector is Newton
shooting.  Steps halve on corrector failure (floor 1e-9) and grow by 1.3 on
fast convergence.  If natural steps hit the floor while the shooting
determinant collapses, one pseudo-arclength step takes over and the fold is
recorded; otherwise the run is truncated with a diagnostic.

Bifurcations are located on monodromy data through the test functions

    deg(s1, s2)   = s2 - 2 s1 + 2      (multiplier +1),
    pd(s1, s2)    = s2 + 2 s1 + 2      (multiplier -1),
    krein(s1, s2) = s1^2 - 4 s2 + 8    (unit-circle multiplier collision),

bisected to a requested bracket width on sign changes.  Tangential zeros
(the rotating-Kepler degeneracies touch +1 without crossing, so deg has a
double zero) are refined by bounded scalar minimization.  The Krein test
only applies where the endpoints are on the unit circle or just left it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .belbruno import belbruno_forward
from .frames import hill_energy_from_moon
from .gamma import chart_phase_point
from .integrator import IntegratorConfig, IntegrationError
from .orbit import (OrbitRecord, ConvergenceError, RootFailure,
                    find_polar_orbit)
from .stability import spectrum_of_record, StabilityClass

__all__ = ["StepConfig", "BifurcationEvent", "ContinuationRun", "EventKind",
           "continue_in_h", "continue_in_mu", "detect_events", "hill_orbit"]

_KREIN_DEADBAND = 1e-8
_TOUCH_SCAN = 1e-3
_TOUCH_ACCEPT = 1e-7


class EventKind(str, Enum):
    DEGENERACY = "degeneracy"
    PERIOD_DOUBLING = "period_doubling"
    KREIN_COLLISION = "krein_collision"
    FOLD = "fold"


@dataclass(frozen=True)
class StepConfig:
    initial: float = 0.02
    max: float = 0.05
    min: float = 1e-9
    grow: float = 1.3
    shrink: float = 0.5
    fast_iters: int = 3


@dataclass
class BifurcationEvent:
    kind: EventKind
    bracket: tuple
    test_values: tuple
    parameter: str
    resolved: bool = True

    @property
    def location(self) -> float:
        return 0.5 * (self.bracket[0] + self.bracket[1])


@dataclass
class ContinuationRun:
    parameter: str                # "h" or "mu"
    fixed_value: float            # the non-varying parameter
    path: list
    events: list = dfield(default_factory=list)
    step_history: list = dfield(default_factory=list)
    truncated: bool = False
    message: str = ""
    problem: object = None        # param -> OrbitRecord resolver for refinement

    def params(self):
        return np.array([getattr(r, self.parameter) for r in self.path])


def _unknowns(rec: OrbitRecord):
    sp = rec.section_point
    return np.array([rec.period_s, sp.Q2, sp.P1, sp.Q3])


def _guess_from(records, attr, p_next):
    """Linear extrapolation of the shooting unknowns in the parameter."""
    u1 = _unknowns(records[-1])
    if len(records) < 2:
        return tuple(u1)
    p0, p1 = getattr(records[-2], attr), getattr(records[-1], attr)
    if p0 == p1:
        return tuple(u1)
    u0 = _unknowns(records[-2])
    w = (p_next - p1) / (p1 - p0)
    return tuple(u1 + w * (u1 - u0))


def _trace(problem, attr, fixed_value, p_start, p_end, step_config, seed_record):
    run = ContinuationRun(parameter=attr, fixed_value=fixed_value,
                          path=[seed_record], problem=problem)
    if p_end == p_start:
        return run
    direction = math.copysign(1.0, p_end - p_start)
    step = direction * abs(step_config.initial)
    p = p_start
    while direction * (p_end - p) > 1e-15:
        p_next = p + step
        if direction * (p_next - p_end) > 0.0:
            p_next = p_end
        guess = _guess_from(run.path, attr, p_next)
        try:
            rec = problem(p_next, guess)
        except (ConvergenceError, RootFailure, IntegrationError) as exc:
            if abs(step) * step_config.shrink >= step_config.min:
                step *= step_config.shrink
                continue
            rec2, fold = _arclength_step(problem, attr, run, direction, step_config)
            if rec2 is not None:
                run.events.append(fold)
                run.path.append(rec2)
                run.step_history.append(getattr(rec2, attr) - p)
                p = getattr(rec2, attr)
                step = direction * abs(step_config.initial)
                continue
            run.truncated = True
            run.message = f"step floor reached at {attr}={p_next:.8g}: {exc}"
            break
        run.path.append(rec)
        run.step_history.append(p_next - p)
        p = p_next
        if rec.iterations <= step_config.fast_iters:
            step = direction * min(abs(step) * step_config.grow, step_config.max)
    return run


def _arclength_step(problem, attr, run, direction, step_config):
    """One pseudo-arclength corrector step for a suspected fold.

    Engaged only after natural steps hit the floor with a collapsing
    shooting determinant; frees the parameter and constrains progress along
    the secant tangent instead.
    """
    if len(run.path) < 2 or abs(run.path[-1].delta) > 1e-4:
        return None, None
    r1, r0 = run.path[-1], run.path[-2]
    p1, p0 = getattr(r1, attr), getattr(r0, attr)
    if p1 == p0:
        return None, None
    v1 = np.concatenate([[p1], _unknowns(r1)[:3]])
    v0 = np.concatenate([[p0], _unknowns(r0)[:3]])
    tau = v1 - v0
    tau /= np.linalg.norm(tau)
    ds = max(abs(p1 - p0), 10.0 * step_config.min)
    for _ in range(6):
        v_pred = v1 + ds * tau
        rec = _arclength_newton(problem, attr, run, v_pred, tau, ds, v1)
        if rec is not None:
            fold = BifurcationEvent(EventKind.FOLD,
                                    (min(p1, getattr(rec, attr)),
                                     max(p1, getattr(rec, attr))),
                                    (r1.delta, rec.delta), attr, resolved=False)
            return rec, fold
        ds *= 0.5
    return None, None


def _arclength_newton(problem, attr, run, v_pred, tau, ds, v_prev, max_iter=12):
    q3 = run.path[-1].section_point.Q3
    v = v_pred.copy()
    for _ in range(max_iter):
        try:
            rec = problem(v[0], (v[1], v[2], v[3], q3))
        except (ConvergenceError, RootFailure, IntegrationError):
            return None
        v_new = np.concatenate([[getattr(rec, attr)], _unknowns(rec)[:3]])
        c = float((v_new - v_prev) @ tau - ds)
        if abs(c) <= 1e-10:
            return rec
        # project back onto the arclength plane along the parameter direction
        if tau[0] == 0.0:
            return rec
        v = v_new
        v[0] -= c / tau[0]
        q3 = rec.section_point.Q3
    return None


# -- public drivers ----------------------------------------------------------

def hill_orbit(h, mu, config=None) -> OrbitRecord:
    """Converged rescaled-chart orbit at (h, mu), continuing in mu if needed.

    At mu = 0 (and mu = 1, the rotating Kepler problem) the collision seed
    is exact; for intermediate mu a short homotopy from mu = 0 at fixed h
    supplies the Newton start when the direct solve fails.
    """
    cfg = config or IntegratorConfig()
    try:
        return find_polar_orbit(h, mu, chart="hill", config=cfg)
    except (ConvergenceError, RootFailure):
        pass
    base = find_polar_orbit(h, 0.0, chart="hill", config=cfg)
    sc = StepConfig(initial=max(mu / 8.0, 1e-6), max=max(mu / 4.0, 1e-6))
    run = _trace(lambda m, g: find_polar_orbit(h, m, initial=g, chart="hill",
                                               config=cfg),
                 "mu", h, 0.0, mu, sc, base)
    if run.truncated or abs(run.path[-1].mu - mu) > 1e-14:
        raise ConvergenceError(f"homotopy to mu={mu} failed: {run.message}")
    return run.path[-1]


def continue_in_h(mu, h_start, h_end, step_config=None, initial=None,
                  chart="hill", config=None) -> ContinuationRun:
    """Trace the family in energy at fixed mass ratio."""
    sc = step_config or StepConfig()
    cfg = config or IntegratorConfig()

    def problem(h, guess):
        return find_polar_orbit(h, mu, initial=guess, chart=chart, config=cfg)

    if initial is None:
        if chart == "hill":
            seed = hill_orbit(h_start, mu, cfg)
        else:
            seed = find_polar_orbit(h_start, mu, chart=chart, config=cfg)
    elif isinstance(initial, OrbitRecord):
        seed = initial if abs(initial.h - h_start) < 1e-14 else \
            problem(h_start, tuple(_unknowns(initial)))
    else:
        seed = problem(h_start, initial)
    return _trace(problem, "h", mu, h_start, h_end, sc, seed)


def _moon_guess_from_hill(record: OrbitRecord):
    """Convert a rescaled-chart orbit into a moon-chart shooting guess."""
    mu = record.mu
    scale = mu ** (1.0 / 3.0)
    sp = record.section_point
    x0 = np.array([0.0, sp.Q2, sp.Q3, sp.P1, 0.0, 0.0])
    qhat, phat = chart_phase_point(x0)
    Q, P = belbruno_forward(scale * qhat, scale * phat)
    S_phys = record.period_s / scale       # ds = mu^(1/3) ds_hat
    return (S_phys, Q[1], P[0], Q[2])


def continue_in_mu(h_unrescaled, mu_start, mu_end, step_config=None,
                   initial=None, config=None) -> ContinuationRun:
    """Trace the fixed-energy bridge in mu on the moon-centered chart.

    The energy is the unrescaled moon-centered value h_m, the convention in
    which the bridge connects small-mu near-collision orbits to the rotating
    Kepler problem at mu = 1.
    """
    sc = step_config or StepConfig(initial=0.01, max=0.02)
    cfg = config or IntegratorConfig()

    def problem(m, guess):
        return find_polar_orbit(h_unrescaled, m, initial=guess, chart="moon",
                                config=cfg)

    if initial is None:
        if mu_start >= 0.9:
            kepler = find_polar_orbit(h_unrescaled, 1.0, chart="moon", config=cfg)
            seed = kepler if mu_start == 1.0 else \
                _walk_seed(problem, kepler, 1.0, mu_start, sc)
        else:
            h_hat = hill_energy_from_moon(h_unrescaled, mu_start)
            hill_rec = hill_orbit(h_hat, mu_start, cfg)
            seed = problem(mu_start, _moon_guess_from_hill(hill_rec))
    elif isinstance(initial, OrbitRecord):
        seed = initial
    else:
        seed = problem(mu_start, initial)
    return _trace(problem, "mu", h_unrescaled, mu_start, mu_end, sc, seed)


def _walk_seed(problem, seed, p_from, p_to, step_config):
    run = _trace(problem, "mu", None, p_from, p_to, step_config, seed)
    if run.truncated:
        raise ConvergenceError(f"seeding walk failed: {run.message}")
    return run.path[-1]


# -- bifurcation detection ----------------------------------------------------

def _tests(spec):
    return {
        "deg": spec.s2 - 2.0 * spec.s1 + 2.0,
        "pd": spec.s2 + 2.0 * spec.s1 + 2.0,
        "krein": spec.s1 * spec.s1 - 4.0 * spec.s2 + 8.0,
    }


_KIND_OF = {"deg": EventKind.DEGENERACY, "pd": EventKind.PERIOD_DOUBLING,
            "krein": EventKind.KREIN_COLLISION}

# Krein events are meaningful while the quartet is on the unit circle (or
# has only just left it): require endpoints in these classes.
_KREIN_CLASSES = (StabilityClass.ELLIPTIC_ELLIPTIC,
                  StabilityClass.COMPLEX_HYPERBOLIC)


def detect_events(run: ContinuationRun, stability_fn=None, tol=1e-5,
                  max_bisect=80) -> list:
    """Locate bifurcations along a completed run; result also stored on the run."""
    sfn = stability_fn or spectrum_of_record
    if run.problem is None:
        raise ValueError("run carries no resolver; rerun a continuation first")
    attr = run.parameter
    recs = run.path
    if len(recs) < 2:
        return []
    params = [getattr(r, attr) for r in recs]
    specs = [sfn(r) for r in recs]
    tests = [_tests(s) for s in specs]

    def value_at(p, guess, name):
        rec = run.problem(p, guess)
        return _tests(sfn(rec))[name], rec

    events = []
    for i in range(len(recs) - 1):
        a, b = params[i], params[i + 1]
        for name in ("deg", "pd", "krein"):
            fa, fb = tests[i][name], tests[i + 1][name]
            if name == "krein":
                if not (specs[i].stability_class in _KREIN_CLASSES
                        and specs[i + 1].stability_class in _KREIN_CLASSES):
                    continue
                if abs(fa) < _KREIN_DEADBAND or abs(fb) < _KREIN_DEADBAND:
                    continue
            if fa == 0.0 or fb == 0.0 or (fa > 0.0) == (fb > 0.0):
                continue
            lo, hi, flo, fhi = a, b, fa, fb
            rec_lo, rec_hi = recs[i], recs[i + 1]
            resolved = True
            while abs(hi - lo) > tol:
                mid = 0.5 * (lo + hi)
                try:
                    fm, rec_m = value_at(mid, _guess_from([rec_lo, rec_hi], attr, mid),
                                         name)
                except (ConvergenceError, RootFailure, IntegrationError):
                    resolved = False
                    break
                if (fm > 0.0) == (flo > 0.0):
                    lo, flo, rec_lo = mid, fm, rec_m
                else:
                    hi, fhi, rec_hi = mid, fm, rec_m
            events.append(BifurcationEvent(_KIND_OF[name],
                                           (min(lo, hi), max(lo, hi)),
                                           (flo, fhi), attr, resolved))
    events.extend(_touch_events(tests, params, recs, attr, tol, value_at))
    events.sort(key=lambda e: e.location)
    run.events = [e for e in run.events if e.kind == EventKind.FOLD] + events
    return events


def _touch_events(tests, params, recs, attr, tol, value_at):
    """Tangential zeros of deg/pd: local minima of the test dipping to zero."""
    out = []
    for name in ("deg", "pd"):
        vals = np.array([t[name] for t in tests])
        sgn = float(np.sign(vals[np.argmax(np.abs(vals))])) or 1.0
        f = sgn * vals
        for i in range(1, len(f) - 1):
            if not (f[i] < f[i - 1] and f[i] < f[i + 1]):
                continue
            if f[i] > _TOUCH_SCAN or f[i] < 0.0:
                continue
            lo, hi = sorted((params[i - 1], params[i + 1]))

            def obj(p, _n=name, _i=i):
                try:
                    v, _ = value_at(p, _guess_from([recs[_i]], attr, p), _n)
                except (ConvergenceError, RootFailure, IntegrationError):
                    return np.inf
                return sgn * v

            res = minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 0.25 * tol})
            if res.fun <= _TOUCH_ACCEPT:
                x = float(res.x)
                out.append(BifurcationEvent(
                    _KIND_OF[name], (x - 0.5 * tol, x + 0.5 * tol),
                    (float(res.fun), float(res.fun)), attr, True))
    return out
