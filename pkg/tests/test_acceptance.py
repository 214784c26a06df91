"""Acceptance criteria A1-A10, each with its stated tolerance and budget.

Heavy artifacts (family sweeps, bridges) are computed once in module-scoped
fixtures and shared; every criterion prints one PASS line on success (an
assertion failure marks the criterion FAIL).
"""

import sys
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from hillpolar.belbruno import belbruno_forward, belbruno_inverse
from hillpolar.continuation import (StepConfig, continue_in_h, continue_in_mu,
                                    detect_events, EventKind)
from hillpolar.frames import (Frame, FrameTag, PhaseState, eval_energy,
                              frame_field, hill_energy_from_moon,
                              moon_energy_from_barycentric)
from hillpolar.gamma import (Chart, gamma_field, gamma_value, involution)
from hillpolar.integrator import integrate, integrate_to_section
from hillpolar.moser import (MoserState, moser_chart_to_sphere,
                             moser_sphere_to_chart, constraint_values,
                             constrained_field, moser_hamiltonian)
from hillpolar.orbit import (amplitude, collision_period, find_polar_orbit,
                             hill_axis_potential, section_state)
from hillpolar.stability import (StabilityClass, monodromy, spectrum_of_record,
                                 rotating_kepler_degeneracies)

MOON_EARTH_MU = 0.01215


def _report(name, detail=""):
    print(f"{name} PASS {detail}".rstrip())


# -- shared heavy computations ------------------------------------------------

@pytest.fixture(scope="module")
def mu0_sweep():
    t0 = time.perf_counter()
    run = continue_in_h(0.0, -2.0, 0.5, StepConfig(initial=0.015, max=0.015))
    events = detect_events(run, tol=1e-5)
    return run, events, time.perf_counter() - t0


@pytest.fixture(scope="module")
def kepler_sweep():
    run = continue_in_h(1.0, -0.5996, -0.201,
                        StepConfig(initial=0.0053, max=0.0053))
    events = detect_events(run, tol=1e-5)
    return run, events


@pytest.fixture(scope="module")
def bridges():
    t0 = time.perf_counter()
    main = continue_in_mu(-2.0, 1e-3, 0.998, StepConfig(initial=0.005, max=0.02))
    partial = continue_in_mu(-0.1, 0.999, 0.963,
                             StepConfig(initial=5e-4, max=2e-3))
    return main, partial, time.perf_counter() - t0


@pytest.fixture(scope="module")
def moon_earth_sweep():
    mu = MOON_EARTH_MU

    def hat(h_bary):
        return hill_energy_from_moon(moon_energy_from_barycentric(h_bary, mu), mu)

    run = continue_in_h(mu, hat(-1.60), hat(-1.49),
                        StepConfig(initial=0.02, max=0.02))
    events = detect_events(run, tol=1e-5)
    return run, events, hat


@pytest.fixture(scope="module")
def a4_orbits():
    out = {}
    for mu in (0.0, 1e-6, 1e-3):
        for h in (-2.0, -1.0, 0.5):
            out[(mu, h)] = find_polar_orbit(h, mu)
    return out


def _symmetry_residual(rec, n_probe=7):
    ch = Chart(rec.chart, rec.mu, rec.h)
    sp = rec.section_point
    x0 = section_state(sp.Q2, sp.P1, sp.Q3)
    sigma = rec.half_period_s
    traj = integrate(gamma_field(ch), x0, (0.0, 2.0 * sigma))
    worst = np.max(np.abs(traj.final.state[:6] - x0[:6]))
    for f in np.linspace(0.1, 0.9, n_probe):
        a = traj.state_at(sigma * (1 + f))
        b = involution(traj.state_at(sigma * (1 - f)))
        worst = max(worst, np.max(np.abs(a[:6] - b[:6])))
    return worst, traj


# -- criteria -----------------------------------------------------------------

def test_A1_period_bound():
    t0 = time.perf_counter()
    for h in (-50.0, -5.0, -2.0, -1.0, 0.0, 1.0, 8.0, 50.0):
        T = collision_period(h)
        assert 0.0 < T < np.pi
    oracle = 2.0 * np.pi * 100.0 ** -1.5
    assert abs(collision_period(-50.0) - oracle) <= 0.01 * oracle
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    _report("A1", f"(period bound, {elapsed:.2f}s)")


def test_A2_amplitude():
    rng = np.random.default_rng(42)
    for h in rng.uniform(-50.0, 50.0, size=100):
        assert abs(hill_axis_potential(amplitude(h)) - h) <= 1e-12
    assert abs(amplitude(0.0) - 2.0 ** (1.0 / 3.0)) <= 1e-13
    _report("A2", "(amplitude cubic)")


def test_A3_regularization_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        q = rng.normal(size=3) * 2.0
        p = rng.uniform(-5.0, 5.0, size=3)
        Q, P = belbruno_forward(q, p)
        qb, pb = belbruno_inverse(Q, P)
        worst = max(worst, np.max(np.abs(qb - q)), np.max(np.abs(pb - p)))
    assert worst <= 1e-12
    worst = 0.0
    for _ in range(1000):
        x = rng.normal(size=3)
        y = rng.normal(size=3)
        st = moser_chart_to_sphere(x, y)
        xb, yb = moser_sphere_to_chart(st)
        worst = max(worst, np.max(np.abs(xb - x)), np.max(np.abs(yb - y)))
    assert worst <= 1e-13

    # common off-collision arc on the h = -2, mu = 0 level set
    h = -2.0
    fr = Frame(FrameTag.HILL_RESCALED, 0.0)
    q0 = np.array([0.1, 0.05, 0.2])
    p13 = (0.5, 1.5)

    def level(p2):
        return eval_energy(PhaseState(q0, [p13[0], p2, p13[1]], fr)) - h

    p0 = np.array([p13[0], brentq(level, 0.0, 5.0, xtol=1e-15), p13[1]])
    T = 0.4
    direct = integrate(frame_field(fr), np.concatenate([q0, p0]), (0.0, T))
    x_direct = direct.final.state

    ch = Chart("hill", 0.0, h)
    Q, P = belbruno_forward(q0, p0)
    x0 = np.concatenate([Q, P, [0.0]])
    x_reg, s_el = integrate_to_section(gamma_field(ch), x0,
                                       lambda x: x[6] - T, direction=+1)
    q_g, p_g = belbruno_inverse(x_reg[:3], x_reg[3:6])
    assert abs(x_reg[6] - T) <= 1e-8
    assert np.max(np.abs(q_g - x_direct[:3])) <= 1e-8
    assert np.max(np.abs(p_g - x_direct[3:])) <= 1e-8

    from hillpolar.frames import _ham_hill
    hn = moser_hamiltonian(lambda q, p: _ham_hill(list(q) + list(p), 0.0, 1.0), n=3)
    st = moser_chart_to_sphere(p0, q0)
    sphere = integrate(constrained_field(hn, n=3), st.x, (0.0, T))
    stf = MoserState(sphere.final.state[:4], sphere.final.state[4:])
    xf, yf = moser_sphere_to_chart(stf)
    assert np.max(np.abs(yf - x_direct[:3])) <= 1e-8
    assert np.max(np.abs(xf - x_direct[3:])) <= 1e-8
    assert np.max(np.abs(yf - q_g)) <= 1e-8
    drift = max(abs(v) for st_s in sphere.samples
                for v in constraint_values(MoserState(st_s.state[:4],
                                                      st_s.state[4:])))
    assert drift <= 1e-10
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0
    _report("A3", f"(chart agreement, {elapsed:.1f}s)")


def test_A4_closure_symmetry_energy(a4_orbits):
    for (mu, h), rec in a4_orbits.items():
        sym, traj = _symmetry_residual(rec)
        assert sym <= 1e-9, (mu, h)
        ch = Chart(rec.chart, rec.mu, rec.h)
        sp = rec.section_point
        x0 = section_state(sp.Q2, sp.P1, sp.Q3)
        closure = np.max(np.abs(traj.final.state[:6] - x0[:6]))
        assert closure <= 1e-9, (mu, h)
        gam = max(abs(gamma_value(ch, s.state[:6])) for s in traj.samples)
        assert gam <= 1e-10, (mu, h)
        # unregularized energy conservation, measured away from collision
        fr = Frame(FrameTag.HILL_RESCALED, mu)
        drift = 0.0
        for s in traj.samples:
            from hillpolar.gamma import time_rate
            if time_rate(s.state) < 0.1 * rec.apoapsis:
                continue
            q, p = belbruno_inverse(s.state[:3], s.state[3:6])
            drift = max(drift, abs(eval_energy(PhaseState(q, p, fr)) - h))
        assert drift <= 1e-10, (mu, h)
    _report("A4", f"({len(a4_orbits)} orbits)")


PROPOSITION = [
    (EventKind.PERIOD_DOUBLING, -1.025245, -1.025225),
    (EventKind.DEGENERACY, -0.85556, -0.85555),
    (EventKind.DEGENERACY, 0.043843, 0.043844),
    (EventKind.PERIOD_DOUBLING, 0.0909615, 0.0909616),
    (EventKind.KREIN_COLLISION, 0.109989, 0.109990),
]


def test_A5_bifurcation_brackets(mu0_sweep):
    run, events, elapsed = mu0_sweep
    assert not run.truncated
    assert elapsed < 600.0
    assert len(events) == len(PROPOSITION)
    for ev, (kind, lo, hi) in zip(events, PROPOSITION):
        assert ev.kind is kind
        center = 0.5 * (lo + hi)
        assert abs(ev.location - center) <= 5e-4 + 0.5 * (hi - lo)
        # bracket containment up to the stated slack
        assert ev.bracket[0] <= hi + 5e-4 and ev.bracket[1] >= lo - 5e-4
    # the unit-circle collision sits between on-circle and off-circle classes
    krein = next(e for e in events if e.kind is EventKind.KREIN_COLLISION)
    left = max((r for r in run.path if r.h < krein.bracket[0]),
               key=lambda r: r.h)
    right = min((r for r in run.path if r.h > krein.bracket[1]),
                key=lambda r: r.h)
    assert spectrum_of_record(left).stability_class is StabilityClass.ELLIPTIC_ELLIPTIC
    assert spectrum_of_record(right).stability_class is StabilityClass.COMPLEX_HYPERBOLIC
    # below h = 0 the class changes exactly twice along the sweep
    classes = [spectrum_of_record(r).stability_class for r in run.path if r.h <= 0.0]
    transitions = sum(1 for a, b in zip(classes, classes[1:]) if a is not b)
    assert transitions == 2
    _report("A5", f"({len(events)} events, {elapsed:.0f}s)")


A6_CLASSES = [
    (-2.0, StabilityClass.ELLIPTIC_ELLIPTIC),
    (-1.5, StabilityClass.ELLIPTIC_ELLIPTIC),
    (-0.95, StabilityClass.ELLIPTIC_NEG_HYPERBOLIC),
    (0.0, StabilityClass.HYPERBOLIC_NEG_HYPERBOLIC),
    (1.0, StabilityClass.COMPLEX_HYPERBOLIC),
    (8.0, StabilityClass.COMPLEX_HYPERBOLIC),
]


@pytest.mark.parametrize("h,expected", A6_CLASSES, ids=lambda v: str(v))
def test_A6_stability_classes(h, expected):
    rec = find_polar_orbit(h, 0.0)
    got = spectrum_of_record(rec).stability_class
    assert got is expected, f"h={h}: computed {got.value}"
    _report("A6", f"(h={h}: {got.value})")


def test_A7_spectrum_invariants(a4_orbits, mu0_sweep, kepler_sweep, bridges,
                                moon_earth_sweep):
    corpus = list(a4_orbits.values())
    corpus += mu0_sweep[0].path
    corpus += kepler_sweep[0].path
    corpus += moon_earth_sweep[0].path
    main, partial, _ = bridges
    corpus += main.path + partial.path
    worst = dict(det6=0.0, trivial=0.0, recip=0.0, s31=0.0)
    for rec in corpus:
        spec = spectrum_of_record(rec)
        M = monodromy(rec)
        worst["det6"] = max(worst["det6"], abs(np.linalg.det(M) - 1.0))
        worst["trivial"] = max(worst["trivial"], spec.trivial_pair_error)
        recip = max(min(abs(l * m - 1.0) for m in spec.eigenvalues)
                    for l in spec.eigenvalues)
        worst["recip"] = max(worst["recip"], recip)
        worst["s31"] = max(worst["s31"], abs(spec.s3 - spec.s1))
    assert worst["det6"] <= 1e-8
    assert worst["trivial"] <= 1e-6
    assert worst["recip"] <= 1e-7
    assert worst["s31"] <= 1e-7
    _report("A7", f"({len(corpus)} orbits: " +
            " ".join(f"{k}={v:.1e}" for k, v in worst.items()) + ")")


def test_A8_rotating_kepler_degeneracies(kepler_sweep):
    run, events = kepler_sweep
    assert not run.truncated
    deg = sorted(e.location for e in events if e.kind is EventKind.DEGENERACY)
    oracle = rotating_kepler_degeneracies(3)
    assert len(deg) >= 3
    for found, expect in zip(deg[:3], sorted(oracle)):
        assert abs(found - expect) <= 1e-3
    worst = max(np.max(np.abs(np.abs(spectrum_of_record(r).eigenvalues) - 1.0))
                for r in run.path)
    assert worst <= 1e-6
    _report("A8", f"(degeneracies {[f'{d:.5f}' for d in deg[:3]]}, "
                  f"|lam|-1 max {worst:.1e})")


def test_A9_bridges(bridges):
    main, partial, elapsed = bridges
    assert elapsed < 1800.0
    assert not main.truncated
    assert main.path[-1].mu == pytest.approx(0.998)
    assert main.path[0].mu == pytest.approx(1e-3)
    assert all(r.residual <= 1e-10 for r in main.path)
    worst_sym = 0.0
    for rec in main.path:
        sym, _ = _symmetry_residual(rec, n_probe=3)
        worst_sym = max(worst_sym, sym)
    assert worst_sym <= 1e-8
    assert not partial.truncated
    assert partial.path[-1].mu == pytest.approx(0.963)
    assert all(r.residual <= 1e-10 for r in partial.path)
    _report("A9", f"(bridge {len(main.path)} + partial {len(partial.path)} "
                  f"records, sym {worst_sym:.1e}, {elapsed:.0f}s)")


def test_A10_moon_earth(moon_earth_sweep):
    run, events, hat = moon_earth_sweep
    mu = MOON_EARTH_MU
    scale = mu ** (1.0 / 3.0) * 386000.0
    target = hat(-1.52)
    rec = min(run.path, key=lambda r: abs(r.h - target))
    assert abs(rec.h - target) < 0.03
    peri_km = rec.periapsis * scale
    assert peri_km > 1716.0          # physically a non-collision orbit
    assert abs(peri_km - 4389.0) <= 0.10 * 4389.0
    pd = [e for e in events if e.kind is EventKind.PERIOD_DOUBLING]
    assert len(pd) >= 1
    h_pd = pd[0].location
    crossing = None
    for r in sorted(run.path, key=lambda r: r.h):
        if r.periapsis * scale > 1766.0:
            crossing = r.h
            break
    assert crossing is not None
    assert crossing < h_pd           # clears 50 km above the surface first
    _report("A10", f"(peri(h~-1.52)={peri_km:.0f} km, PD at hhat={h_pd:.4f}, "
                   f"1766 km crossing at hhat={crossing:.4f})")


def test_primary_runs_without_plotkit():
    assert not any("plotkit" in m for m in sys.modules)
    _report("A11-primary", "(no plot dependency in the primary suite)")
