import numpy as np
import pytest

from hillpolar.continuation import (StepConfig, continue_in_h, continue_in_mu,
                                    detect_events, hill_orbit, EventKind,
                                    _moon_guess_from_hill)
from hillpolar.frames import hill_energy_from_moon
from hillpolar.orbit import find_polar_orbit


def test_single_point_run():
    run = continue_in_h(0.0, -2.0, -2.0)
    assert len(run.path) == 1
    assert not run.truncated


def test_short_run_residuals_and_steps():
    run = continue_in_h(0.0, -2.0, -1.6, StepConfig(initial=0.05, max=0.1))
    assert not run.truncated
    assert run.path[-1].h == pytest.approx(-1.6)
    assert all(r.residual <= 1e-10 for r in run.path)
    # fast convergence grows steps up to the cap
    assert max(abs(s) for s in run.step_history) > 0.05


def test_path_consistency_under_step_refinement():
    a = continue_in_h(1e-3, -2.0, -1.8, StepConfig(initial=0.1, max=0.1))
    b = continue_in_h(1e-3, -2.0, -1.8, StepConfig(initial=0.05, max=0.05))
    ra = a.path[-1].section_point
    rb = b.path[-1].section_point
    assert abs(ra.Q2 - rb.Q2) < 1e-8
    assert abs(ra.P1 - rb.P1) < 1e-8


def test_period_doubling_event_bracketed():
    run = continue_in_h(0.0, -1.1, -0.95, StepConfig(initial=0.02, max=0.02))
    events = detect_events(run, tol=1e-5)
    pd = [e for e in events if e.kind is EventKind.PERIOD_DOUBLING]
    assert len(pd) == 1
    lo, hi = pd[0].bracket
    assert hi - lo <= 1e-5
    assert lo < -1.02523 < hi or abs(pd[0].location + 1.02524) < 5e-4
    # test values straddle zero
    assert pd[0].test_values[0] * pd[0].test_values[1] <= 0


def test_degeneracy_event_bracketed():
    run = continue_in_h(0.0, -0.9, -0.8, StepConfig(initial=0.02, max=0.02))
    events = detect_events(run, tol=1e-5)
    deg = [e for e in events if e.kind is EventKind.DEGENERACY]
    assert len(deg) == 1
    assert abs(deg[0].location + 0.85555) < 5e-4


def test_hill_orbit_homotopy():
    rec = hill_orbit(-1.5, 0.01)
    assert rec.residual <= 1e-10
    assert rec.mu == pytest.approx(0.01)


def test_moon_guess_conversion_is_sharp():
    mu = 1e-3
    h_m = -2.0
    hill_rec = hill_orbit(hill_energy_from_moon(h_m, mu), mu)
    guess = _moon_guess_from_hill(hill_rec)
    rec = find_polar_orbit(h_m, mu, initial=guess, chart="moon")
    assert rec.iterations <= 1
    assert abs(rec.period_t - hill_rec.period_t) < 1e-10


def test_mini_bridge():
    run = continue_in_mu(-2.0, 1e-3, 3e-3, StepConfig(initial=1e-3, max=1e-3))
    assert not run.truncated
    assert run.path[-1].mu == pytest.approx(3e-3)
    assert all(r.residual <= 1e-10 for r in run.path)


def test_bridge_records_keep_symmetry():
    run = continue_in_mu(-2.0, 1e-3, 2e-3, StepConfig(initial=1e-3, max=1e-3))
    from hillpolar.gamma import Chart, gamma_field, involution
    from hillpolar.orbit import section_state
    from hillpolar.integrator import integrate
    rec = run.path[-1]
    ch = Chart("moon", rec.mu, rec.h)
    sp = rec.section_point
    x0 = section_state(sp.Q2, sp.P1, sp.Q3)
    traj = integrate(gamma_field(ch), x0, (0.0, rec.period_s))
    sigma = rec.half_period_s
    for s in (0.3 * sigma, 0.8 * sigma):
        a = traj.state_at(sigma + s)
        b = involution(traj.state_at(sigma - s))
        assert np.max(np.abs(a[:6] - b[:6])) < 1e-8


def test_family_exists_for_all_energies():
    run = continue_in_h(0.0, -5.0, 10.0, StepConfig(initial=0.05, max=0.5))
    assert not run.truncated
    assert run.path[-1].h == pytest.approx(10.0)
    assert all(r.residual <= 1e-10 for r in run.path)


def test_detect_events_requires_resolver():
    from hillpolar.continuation import ContinuationRun
    run = ContinuationRun("h", 0.0, [])
    with pytest.raises(ValueError):
        detect_events(run)


def test_truncation_reported():
    # an impossible target keeps shrinking and finally truncates
    def problem(h, guess):
        from hillpolar.orbit import ConvergenceError
        if h < -2.05:
            raise ConvergenceError("wall")
        return find_polar_orbit(h, 0.0, initial=guess)

    from hillpolar.continuation import _trace
    seed = find_polar_orbit(-2.0, 0.0)
    run = _trace(problem, "h", 0.0, -2.0, -2.5,
                 StepConfig(initial=0.05, max=0.05, min=1e-4), seed)
    assert run.truncated
    assert "step floor" in run.message
    assert run.path[-1].h >= -2.05
