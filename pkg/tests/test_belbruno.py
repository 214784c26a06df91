import numpy as np
import pytest

from hillpolar.belbruno import (belbruno_forward, belbruno_inverse,
                                belbruno_position, DomainError)
from hillpolar.jets import lift_dual
from hillpolar.gamma import time_rate

J6 = np.block([[np.zeros((3, 3)), np.eye(3)], [-np.eye(3), np.zeros((3, 3))]])


def test_rest_point_on_axis():
    Q, P = belbruno_forward([0, 0, 1.0], [0, 0, 0.0])
    assert np.allclose(Q, [0, 0, 0.5])
    assert np.allclose(P, [-1.0, 0, 0])
    q, p = belbruno_inverse(Q, P)
    assert np.allclose(q, [0, 0, 1.0])
    assert np.allclose(p, 0.0)


def test_round_trip():
    rng = np.random.default_rng(0)
    worst = 0.0
    n = 0
    while n < 1000:
        q = rng.normal(size=3) * 2.0
        p = rng.uniform(-5, 5, size=3)
        Q, P = belbruno_forward(q, p)
        qb, pb = belbruno_inverse(Q, P)
        worst = max(worst, np.max(np.abs(qb - q)), np.max(np.abs(pb - p)))
        n += 1
    assert worst <= 1e-12


def test_collision_limit_of_momentum():
    # large |p| maps close to the collision point P = (1, 0, 0)
    _, P = belbruno_forward([0.3, -0.2, 0.5], [0, 0, 1e6])
    # oracle: P1 = (|p|^2 - 1)/|p + 1|^2 in swapped coordinates
    assert abs((1.0 - P[0]) - 2e-12) < 1e-14
    assert np.hypot(P[1], P[2]) < 3e-6


def test_norm_identity():
    # |q| equals (1/2)|P - 1|^2 |Q| exactly
    rng = np.random.default_rng(1)
    for _ in range(200):
        q = rng.normal(size=3)
        p = rng.normal(size=3)
        Q, P = belbruno_forward(q, p)
        x = np.concatenate([Q, P, [0.0]])
        assert abs(time_rate(x) - np.linalg.norm(q)) < 1e-12 * max(1, np.linalg.norm(q))


def test_position_part_defined_at_collision():
    # polynomial position formula vanishes identically at P = (1,0,0)
    rng = np.random.default_rng(2)
    for _ in range(20):
        Q = rng.normal(size=3)
        qhat = belbruno_position(Q, np.array([1.0, 0.0, 0.0]))
        assert np.max(np.abs(qhat)) < 1e-15


def test_transform_is_symplectic():
    def fwd(x):
        # dual-friendly forward transform in caller ordering
        q = x[:3]
        p = x[3:]
        qv = [q[1], q[0], q[2]]
        pv = [p[1], p[0], p[2]]
        n2 = pv[0] * pv[0] + pv[1] * pv[1] + pv[2] * pv[2]
        dp = (pv[0] + 1.0) ** 2 + pv[1] ** 2 + pv[2] ** 2
        s = qv[0] * pv[0] + qv[1] * pv[1] + qv[2] * pv[2]
        Q = [0.5 * (1 - n2) * qv[0] + s * (pv[0] + 1.0),
             0.5 * (n2 + 1) * qv[1] + pv[0] * qv[1] - pv[1] * qv[0] - s * pv[1],
             0.5 * (n2 + 1) * qv[2] + pv[0] * qv[2] - pv[2] * qv[0] - s * pv[2]]
        P = [(n2 - 1.0) / dp, 2.0 * pv[1] / dp, 2.0 * pv[2] / dp]
        return Q + P

    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.normal(size=6)
        out = fwd(lift_dual(x))
        M = np.array([o.g for o in out])
        assert np.max(np.abs(M.T @ J6 @ M - J6)) < 1e-11


def test_domain_errors():
    with pytest.raises(DomainError, match="infinity"):
        belbruno_forward([1.0, 0, 0], [0.0, -1.0, 0.0])
    with pytest.raises(DomainError, match="collision"):
        belbruno_inverse([0, 0, 1.0], [1.0, 0, 0])
