import numpy as np
import pytest

from hillpolar.jordan import (jordan_mul, jordan_conj, jordan_inv,
                              jordan_norm2, jordan_associator, JORDAN_ONE)


def test_imaginary_units_square_to_minus_one():
    i1 = np.array([0.0, 1.0, 0.0])
    i2 = np.array([0.0, 0.0, 1.0])
    assert np.allclose(jordan_mul(i1, i1), [-1.0, 0.0, 0.0])
    assert np.allclose(jordan_mul(i2, i2), [-1.0, 0.0, 0.0])
    assert np.allclose(jordan_mul(i1, i2), [0.0, 0.0, 0.0])


def test_real_subalgebra():
    a = np.array([3.0, 0.0, 0.0])
    b = np.array([-2.5, 0.0, 0.0])
    assert np.allclose(jordan_mul(a, b), [-7.5, 0.0, 0.0])


def test_norm_and_conjugation():
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = rng.normal(size=3)
        prod = jordan_mul(z, jordan_conj(z))
        assert np.allclose(prod, [jordan_norm2(z), 0.0, 0.0], atol=1e-14)


def test_inverse_property():
    rng = np.random.default_rng(1)
    for _ in range(50):
        z = rng.normal(size=3)
        assert np.allclose(jordan_mul(z, jordan_inv(z)), JORDAN_ONE, atol=1e-13)
    with pytest.raises(ZeroDivisionError):
        jordan_inv([0.0, 0.0, 0.0])


def test_commutativity_bilinearity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        x, y, z = rng.normal(size=(3, 3))
        a, b = rng.normal(size=2)
        assert np.allclose(jordan_mul(x, y), jordan_mul(y, x))
        assert np.allclose(jordan_mul(a * x + b * y, z),
                           a * jordan_mul(x, z) + b * jordan_mul(y, z), atol=1e-13)


def test_associator_closed_form():
    # a = x(yz) - (xy)z = (x2 z1 - x1 z2)(i1 y2 - i2 y1)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, y, z = rng.normal(size=(3, 3))
        brute = jordan_associator(x, y, z)
        factor = x[2] * z[1] - x[1] * z[2]
        closed = factor * np.array([0.0, y[2], -y[1]])
        assert np.allclose(brute, closed, atol=1e-12)


def test_associator_example():
    x = np.array([0.0, 1.0, 0.0])
    y = np.array([0.0, 0.0, 1.0])
    z = np.array([0.0, 0.0, 1.0])
    assert np.allclose(jordan_associator(x, y, z), [0.0, -1.0, 0.0])
