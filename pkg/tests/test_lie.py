import numpy as np
import pytest

from orbitron.errors import NotAntisymmetric
from orbitron.lie import (E1, E2, E3, PhasePoint, SE3Element, body_from_space, coad_se3,
                          exp_so3, hat, orthonormality_defect, project_to_so3, rot_z,
                          space_from_body, vee)

from conftest import random_rotation


def test_hat_on_e3():
    assert np.array_equal(hat(E3), [[0, -1, 0], [1, 0, 0], [0, 0, 0]])


def test_hat_zero():
    assert not hat(np.zeros(3)).any()


def test_hat_is_cross_product():
    assert np.allclose(hat([1, 2, 3]) @ np.array([4, 5, 6]), [-3, 6, -3])


def test_hat_linear_and_antisymmetric(rng):
    for _ in range(20):
        u, v = rng.normal(size=3), rng.normal(size=3)
        a = rng.normal()
        assert np.allclose(hat(a * u + v), a * hat(u) + hat(v))
        assert np.allclose(hat(u).T, -hat(u))


def test_vee_round_trip_and_zero():
    assert np.allclose(vee(hat([1.0, 2.0, 3.0])), [1, 2, 3])
    assert np.array_equal(vee(np.zeros((3, 3))), np.zeros(3))


def test_vee_rejects_symmetric():
    with pytest.raises(NotAntisymmetric):
        vee(np.eye(3))


def test_rot_z():
    assert np.array_equal(rot_z(0.0), np.eye(3))
    assert np.allclose(rot_z(np.pi / 2) @ E1, E2, atol=1e-16)
    assert np.abs(rot_z(0.7) @ rot_z(-0.7) - np.eye(3)).max() < 1e-14
    assert np.array_equal(rot_z(1.3) @ E3, E3)


def test_exp_so3_basic():
    assert np.array_equal(exp_so3(np.zeros(3)), np.eye(3))
    assert np.allclose(exp_so3([0, 0, np.pi]), rot_z(np.pi), atol=1e-15)
    for th in (0.3, -2.0, 5.0):
        assert np.allclose(exp_so3(th * E3), rot_z(th), atol=1e-15)


def test_exp_so3_small_angle_taylor():
    v = 1e-5 * np.array([0.3, -0.5, 0.8]) / np.linalg.norm([0.3, -0.5, 0.8])
    err = np.abs(exp_so3(v) - np.eye(3) - hat(v)).max()
    assert err < 1e-10           # O(|v|^2) = 1e-10 scale
    assert err > 1e-12           # and the quadratic term is really there


def test_exp_so3_is_rotation(rng):
    for _ in range(100):
        v = rng.normal(size=3)
        v *= rng.uniform(0, 10) / np.linalg.norm(v)
        R = exp_so3(v)
        assert SE3Element(R, np.zeros(3)).is_valid()


def test_exp_matches_series(rng):
    v = rng.normal(size=3)
    K = hat(v)
    series, term = np.eye(3), np.eye(3)
    for k in range(1, 40):
        term = term @ K / k
        series = series + term
    assert np.abs(exp_so3(v) - series).max() < 1e-13


def test_ad_identity(rng):
    for _ in range(20):
        A = random_rotation(rng)
        v = rng.normal(size=3)
        assert np.abs(A @ hat(v) @ A.T - hat(A @ v)).max() < 1e-12


def test_body_space_identity_configuration(rng):
    Pi, p = rng.normal(size=3), rng.normal(size=3)
    Pb, pb = body_from_space(np.eye(3), np.zeros(3), Pi, p)
    assert np.allclose(Pb, Pi) and np.allclose(pb, p)


def test_body_space_round_trip(rng):
    for _ in range(50):
        A, x = random_rotation(rng), rng.normal(size=3)
        Pi, p = rng.normal(size=3), rng.normal(size=3)
        Ps, ps = space_from_body(A, x, *body_from_space(A, x, Pi, p))
        assert np.abs(Ps - Pi).max() < 1e-12 and np.abs(ps - p).max() < 1e-12


def test_body_from_space_hand_example():
    Pb, pb = body_from_space(rot_z(np.pi / 2), E1, E3, E2)
    assert np.allclose(Pb, 0.0, atol=1e-15)
    assert np.allclose(pb, E1, atol=1e-15)


def test_coad_examples():
    z = np.zeros(3)
    a, b = coad_se3(z, z, z, z)
    assert not a.any() and not b.any()
    a, b = coad_se3(E3, z, E1, z)
    assert np.allclose(a, [0, -1, 0]) and not b.any()
    a, b = coad_se3(z, E1, z, E2)
    assert np.allclose(a, [0, 0, -1]) and not b.any()


def test_coad_is_dual_of_ad(rng):
    # <ad*_xi m, eta> = <m, ad_xi eta> with ad_(r1,t1)(r2,t2) = (r1 x r2, r1 x t2 - r2 x t1)
    r1, t1, r2, t2, mu, al = rng.normal(size=(6, 3))
    a, b = coad_se3(r1, t1, mu, al)
    lhs = a @ r2 + b @ t2
    rhs = mu @ np.cross(r1, r2) + al @ (np.cross(r1, t2) - np.cross(r2, t1))
    assert abs(lhs - rhs) < 1e-12


def test_projection_restores_rotation(rng):
    R = random_rotation(rng)
    noisy = R + 1e-6 * rng.normal(size=(3, 3))
    P = project_to_so3(noisy)
    assert orthonormality_defect(P) < 1e-14
    assert np.linalg.det(P) > 0
    assert np.abs(P - R).max() < 1e-5


def test_phase_point_immutable_and_serializable(rng):
    z = PhasePoint(random_rotation(rng), *rng.normal(size=(3, 3)))
    with pytest.raises(ValueError):
        z.x[0] = 1.0
    w = PhasePoint.from_dict(z.to_dict())
    assert np.array_equal(w.to_vector(), z.to_vector())
    assert np.array_equal(PhasePoint.from_vector(z.to_vector()).A, z.A)
