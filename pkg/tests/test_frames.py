import numpy as np
import pytest

from hillpolar.frames import (
    Frame, FrameTag, PhaseState, CollisionError, ParameterError,
    eval_energy, vector_field, variational_field, frame_field,
    to_moon_centered, to_barycentric, rescale_hill, unscale_hill,
    moon_energy_from_barycentric, hill_energy_from_moon, to_physical_km,
    hill_critical_value, hill_critical_points, hill_tidal,
)
from hillpolar.integrator import integrate, integrate_with_variational
from hillpolar.jets import lift_dual

HILL0 = Frame(FrameTag.HILL_RESCALED, 0.0)


def state(q, p, frame=HILL0):
    return PhaseState(q, p, frame)


def test_hill_energy_on_axis():
    assert np.isclose(eval_energy(state([0, 0, 1], [0, 0, 0])), -0.5, atol=1e-15)


def test_hill_energy_on_x_axis():
    assert np.isclose(eval_energy(state([1, 0, 0], [0, 0, 0])), -2.0, atol=1e-15)


def test_critical_points_energy_and_equilibrium():
    for cp in hill_critical_points():
        assert abs(eval_energy(cp) - hill_critical_value()) < 1e-12
        assert np.max(np.abs(vector_field(cp))) < 1e-12
    assert np.isclose(hill_critical_value(), -0.5 * 3.0 ** (4.0 / 3.0))


def test_axis_force_value():
    # finite-difference oracle for the field at a point on the z-axis
    f = vector_field(state([0, 0, 1], [0, 0, 0]))
    fr = HILL0
    eps = 1e-6
    fd = np.zeros(6)
    for i in range(6):
        x = np.zeros(6)
        x[i] = eps
        sp = PhaseState([0, 0, 1] + x[:3], x[3:], fr)
        sm = PhaseState([0, 0, 1] - x[:3], -x[3:], fr)
        # d/dp of H gives qdot, -d/dq gives pdot
        fd[i] = (eval_energy(sp) - eval_energy(sm)) / (2 * eps)
    expected = np.concatenate([fd[3:], -fd[:3]])
    assert np.allclose(f, expected, atol=1e-6)
    assert np.allclose(f, [0, 0, 0, 0, 0, -2.0], atol=1e-9)


@pytest.mark.parametrize("tag,mu", [
    (FrameTag.HILL_RESCALED, 0.0),
    (FrameTag.HILL_RESCALED, 1e-3),
    (FrameTag.HILL_RESCALED, 0.3),
    (FrameTag.MOON_CENTERED, 0.2),
    (FrameTag.BARYCENTRIC, 0.1),
])
def test_gradient_against_finite_differences(tag, mu):
    fr = Frame(tag, mu)
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 50:
        q = rng.normal(size=3)
        p = rng.normal(size=3)
        if tag == FrameTag.BARYCENTRIC:
            q = q + np.array([0.4, 0, 0])
        if min(np.linalg.norm(q), 1.0) < 0.2:
            continue
        st = PhaseState(q, p, fr)
        f = vector_field(st)
        eps = 1e-6
        x0 = st.x
        for i in range(6):
            e = np.zeros(6)
            e[i] = eps
            hp = eval_energy(PhaseState((x0 + e)[:3], (x0 + e)[3:], fr))
            hm = eval_energy(PhaseState((x0 - e)[:3], (x0 - e)[3:], fr))
            fd = (hp - hm) / (2 * eps)
            target = f[i - 3] if i >= 3 else -f[i + 3]
            assert abs(fd - target) <= 1e-6 * max(1.0, abs(target))
        checked += 1


def test_energy_conservation_identity():
    # directional derivative of the energy along the field vanishes
    rng = np.random.default_rng(6)
    fr = Frame(FrameTag.HILL_RESCALED, 1e-2)
    ham = lambda x: __import__("hillpolar.frames", fromlist=["_ham_hill"])._ham_hill(x, 1e-2, 1.0)
    for _ in range(100):
        x = rng.normal(size=6)
        if np.linalg.norm(x[:3]) < 0.3:
            continue
        g = ham(lift_dual(x)).g
        f = vector_field(PhaseState(x[:3], x[3:], fr))
        assert abs(g @ f) < 1e-12 * max(1.0, np.max(np.abs(g)) * np.max(np.abs(f)))


def test_collision_errors_name_the_body():
    with pytest.raises(CollisionError, match="moon"):
        eval_energy(state([0, 0, 0], [0, 0, 0], Frame(FrameTag.MOON_CENTERED, 0.5)))
    with pytest.raises(CollisionError, match="earth"):
        eval_energy(state([-1, 0, 0], [0, 0, 0], Frame(FrameTag.MOON_CENTERED, 0.5)))
    with pytest.raises(CollisionError):
        eval_energy(state([0, 0, 0], [0, 0, 0]))


def test_variational_field_matches_finite_differences():
    fr = Frame(FrameTag.HILL_RESCALED, 0.0)
    st = state([0.2, -0.1, 0.8], [0.3, 0.5, -0.2])
    V = variational_field(st, np.eye(6))
    eps = 1e-6
    for j in range(6):
        e = np.zeros(6)
        e[j] = eps
        xp, xm = st.x + e, st.x - e
        fp = vector_field(PhaseState(xp[:3], xp[3:], fr))
        fm = vector_field(PhaseState(xm[:3], xm[3:], fr))
        assert np.allclose((fp - fm) / (2 * eps), V[:, j], atol=1e-5)


def test_variational_propagation_is_symplectic():
    fr = Frame(FrameTag.HILL_RESCALED, 0.0)
    x0 = np.array([0.1, 0.05, 0.9, 0.2, -0.1, 0.3])
    _, M, _ = integrate_with_variational(frame_field(fr), x0, np.eye(6), (0.0, 1.3))
    assert abs(np.linalg.det(M) - 1.0) < 1e-8


def test_moon_centered_translation_and_energy_shift():
    mu = 0.1
    fr = Frame(FrameTag.BARYCENTRIC, mu)
    moon = PhaseState([1 - mu, 0, 0], [0, 1 - mu, 0], fr)
    img = to_moon_centered(moon)
    assert np.allclose(img.q, 0.0)
    with pytest.raises(CollisionError):
        eval_energy(img)
    rng = np.random.default_rng(7)
    for _ in range(100):
        st = PhaseState(rng.normal(size=3) + [0.4, 0, 0], rng.normal(size=3), fr)
        rt = to_barycentric(to_moon_centered(st))
        assert np.max(np.abs(rt.q - st.q)) < 1e-15
        assert np.max(np.abs(rt.p - st.p)) < 1e-15
        try:
            h0 = eval_energy(st)
        except CollisionError:
            continue
        h1 = eval_energy(to_moon_centered(st))
        assert abs(h1 - (h0 + 0.5 * (1 - mu) ** 2)) < 1e-12


def test_hill_rescaling_examples_and_energy_relation():
    mu = 1e-3
    fr = Frame(FrameTag.MOON_CENTERED, mu)
    st = PhaseState([0, 0, 0.1], [0, 0, 0], fr)
    hat = rescale_hill(st)
    assert np.allclose(hat.q, [0, 0, 1.0])
    rng = np.random.default_rng(8)
    mu = 1e-4
    fr = Frame(FrameTag.MOON_CENTERED, mu)
    for _ in range(100):
        q = rng.normal(size=3) * 0.01
        p = rng.normal(size=3) * 0.1
        if np.linalg.norm(q) < 1e-4:
            continue
        st = PhaseState(q, p, fr)
        hat = rescale_hill(st)
        lhs = eval_energy(hat)
        rhs = mu ** (-2.0 / 3.0) * (eval_energy(st) + 1 - mu)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
        back = unscale_hill(hat)
        assert np.max(np.abs(back.q - q)) < 1e-15
    with pytest.raises(ParameterError):
        rescale_hill(PhaseState([0, 0, 0.1], [0, 0, 0],
                                Frame(FrameTag.MOON_CENTERED, 0.0)))


def test_energy_bookkeeping_roundtrip():
    mu = 0.05
    h = -1.7
    assert np.isclose(hill_energy_from_moon(moon_energy_from_barycentric(h, mu), mu),
                      (h + 0.5 * (1 - mu) ** 2 + 1 - mu) * mu ** (-2.0 / 3.0))


def test_physical_km():
    st = PhaseState([0.01, 0, 0], [0, 0, 0], Frame(FrameTag.MOON_CENTERED, 0.5))
    assert np.isclose(to_physical_km(st, 386000.0), 3860.0)
    mu = 0.01215
    st = PhaseState([1, 0, 0], [0, 0, 0], Frame(FrameTag.HILL_RESCALED, mu))
    # cube-root arithmetic oracle
    expect = 386000.0 * np.exp(np.log(mu) / 3.0)
    assert abs(to_physical_km(st, 386000.0) - expect) < 1e-6
    with pytest.raises(ParameterError):
        to_physical_km(PhaseState([1, 0, 0], [0, 0, 0],
                                  Frame(FrameTag.BARYCENTRIC, mu)), 386000.0)


def test_z_axis_invariance():
    fr = HILL0
    # span kept short of the genuine axis collision of this orbit
    x0 = np.array([0.0, 0.0, 0.8, 0.0, 0.0, 0.4])
    traj = integrate(frame_field(fr), x0, (0.0, 0.7))
    for s in traj.samples:
        off = np.abs(s.state[[0, 1, 3, 4]])
        assert np.max(off) < 1e-12


def test_hamiltonian_reflection_symmetry():
    rng = np.random.default_rng(9)
    for mu in (0.0, 0.2):
        fr = Frame(FrameTag.HILL_RESCALED, mu)
        for _ in range(50):
            q = rng.normal(size=3)
            p = rng.normal(size=3)
            if np.linalg.norm(q) < 0.2:
                continue
            h1 = eval_energy(PhaseState(q, p, fr))
            h2 = eval_energy(PhaseState([q[0], -q[1], q[2]],
                                        [-p[0], p[1], -p[2]], fr))
            assert h1 == h2


def test_energy_conserved_along_arc():
    fr = Frame(FrameTag.HILL_RESCALED, 1e-3)
    x0 = np.array([0.3, 0.1, 0.7, -0.2, 0.4, 0.1])
    traj = integrate(frame_field(fr), x0, (0.0, 3.0))
    h0 = eval_energy(PhaseState(x0[:3], x0[3:], fr))
    drift = max(abs(eval_energy(PhaseState(s.state[:3], s.state[3:], fr)) - h0)
                for s in traj.samples)
    assert drift <= 1e-10


def test_stable_bracket_matches_naive_form():
    # direct evaluation of the final Hamiltonian term, naive vs rewritten
    rng = np.random.default_rng(10)
    for mu in (0.4, 0.05, 1e-3):
        c = mu ** (1.0 / 3.0)
        for _ in range(30):
            q = rng.normal(size=3)
            x = 2 * c * q[0] + c * c * (q @ q)
            if x <= -0.9:
                continue
            naive = -(1 - mu) / c ** 2 * (1.0 / np.sqrt(1 + x) - 1.0 + c * q[0])
            stable = hill_tidal(q[0], q[1], q[2], mu)
            assert abs(naive - stable) < 1e-9 * max(1.0, abs(stable))


def test_tidal_term_approaches_hill_limit():
    q = (0.3, -0.2, 0.9)
    w0 = hill_tidal(*q, 0.0)
    prev = None
    for mu in (1e-3, 1e-6, 1e-9):
        diff = abs(hill_tidal(*q, mu) - w0)
        assert diff < 5.0 * mu ** (1.0 / 3.0)
        if prev is not None:
            assert diff < prev
        prev = diff


def test_frame_validation():
    with pytest.raises(ParameterError):
        Frame(FrameTag.HILL_RESCALED, 1.5)
    with pytest.raises(ParameterError):
        PhaseState([0, 0, np.inf], [0, 0, 0], HILL0)
