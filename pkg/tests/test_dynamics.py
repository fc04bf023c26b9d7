import math

import numpy as np
import pytest

from orbitron.dynamics import (BodyParams, VelocityPair, augmented_hamiltonian, eom_rhs,
                               hamiltonian, infinitesimal_generator, integrate, momentum_map,
                               relative_orbit, toral_action, trajectory_rows,
                               TRAJECTORY_COLUMNS)
from orbitron.lie import E3, PhasePoint, rot_z, vee
from orbitron.releq import make_regular, make_singular, probe_steps

from conftest import random_rotation


def _random_point(rng, field, scale=1.0):
    x = np.append(rng.uniform(-0.08, 0.08, 2), rng.uniform(-0.02, 0.02))
    return PhasePoint(random_rotation(rng), x, rng.normal(size=3) * 1e-5 * scale,
                      rng.normal(size=3) * 1e-3 * scale)


def _chart(tangent, A):
    """12-vector (a, dx, dPi, dp) of a Tangent, with A_dot = hat(a) A."""
    return np.concatenate([vee(tangent.A_dot @ A.T), tangent.x_dot, tangent.Pi_dot,
                           tangent.p_dot])


def _directional(f, z, v, steps):
    s = 1e-2 / np.abs(v / steps).max()
    return (f(z.perturbed(s * v)) - f(z.perturbed(-s * v))) / (2 * s)


def test_body_params_validation():
    with pytest.raises(ValueError):
        BodyParams(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        BodyParams(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        BodyParams(1.0, 1.0, 1.0, math.inf)


def test_hamiltonian_examples(fig3_body, fig3_field):
    b, f = fig3_body, fig3_field
    z = PhasePoint(np.eye(3), np.zeros(3), np.zeros(3), np.zeros(3))
    assert math.isclose(hamiltonian(b, f, z), -b.mu * f.b(np.zeros(3))[2], rel_tol=1e-15)
    z = PhasePoint(np.eye(3), np.array([0.3, 0, 0]), np.array([1e-6, 0, 2e-6]),
                   np.array([0, 1e-3, 0]))
    kin = 0.5 * (1e-12 / b.I1 + 4e-12 / b.I3) + 1e-6 / (2 * b.M)
    assert math.isclose(hamiltonian(b, f, z), kin - b.mu * f.b(z.x)[2], rel_tol=1e-12)


def test_momentum_map_examples():
    z = PhasePoint(np.eye(3), np.array([1.0, 0, 0]), np.array([0, 0, 2.0]),
                   np.array([0, 3.0, 0]))
    J = momentum_map(z)
    assert (J.J1, J.J2) == (5.0, -2.0)
    z = PhasePoint(rot_z(0.7), np.zeros(3), np.array([0.0, 0.0, 1.5]), np.zeros(3))
    assert math.isclose(momentum_map(z).J1, 1.5, rel_tol=1e-15)


def test_momentum_map_is_invariant(rng):
    for _ in range(10):
        z = PhasePoint(random_rotation(rng), rng.normal(size=3), rng.normal(size=3),
                       rng.normal(size=3))
        w = toral_action(*rng.uniform(0, 2 * np.pi, 2), z)
        a, b = momentum_map(z), momentum_map(w)
        assert math.isclose(a.J1, b.J1, rel_tol=1e-12, abs_tol=1e-12)
        assert math.isclose(a.J2, b.J2, rel_tol=1e-12, abs_tol=1e-12)


def test_hamiltonian_is_invariant(rng, fig3_body, fig3_field):
    for _ in range(10):
        z = _random_point(rng, fig3_field)
        w = toral_action(*rng.uniform(0, 2 * np.pi, 2), z)
        assert math.isclose(hamiltonian(fig3_body, fig3_field, z),
                            hamiltonian(fig3_body, fig3_field, w), rel_tol=1e-11)


def test_eom_is_equivariant(rng, fig3_body, fig3_field):
    for _ in range(10):
        z = _random_point(rng, fig3_field)
        ts, tb = rng.uniform(0, 2 * np.pi, 2)
        Rs, Rb = rot_z(ts), rot_z(tb)
        a = eom_rhs(fig3_body, fig3_field, toral_action(ts, tb, z))
        b = eom_rhs(fig3_body, fig3_field, z)
        s = np.abs(b.to_vector()).max()
        assert np.abs(a.A_dot - Rs @ b.A_dot @ Rb.T).max() < 1e-12 * s
        assert np.abs(a.x_dot - Rs @ b.x_dot).max() < 1e-12 * s
        assert np.abs(a.Pi_dot - Rb @ b.Pi_dot).max() < 1e-12 * s
        assert np.abs(a.p_dot - Rb @ b.p_dot).max() < 1e-12 * s


def test_energy_and_momentum_are_first_integrals(rng, fig3_body, fig3_field):
    b, f = fig3_body, fig3_field
    for _ in range(20):
        z = _random_point(rng, f)
        v = _chart(eom_rhs(b, f, z), z.A)
        steps = probe_steps(b, f, z)
        # energy rate against the size of its individual terms
        grad_scale = np.abs([_directional(lambda u: hamiltonian(b, f, u), z, e * steps[k], steps)
                             for k, e in enumerate(np.eye(12))]).max() / 1e-5
        rate = _directional(lambda u: hamiltonian(b, f, u), z, v, steps)
        assert abs(rate) < 1e-6 * grad_scale * np.abs(v / steps).max() * 1e-5
        for comp in (lambda u: momentum_map(u).J1, lambda u: momentum_map(u).J2):
            assert abs(_directional(comp, z, v, steps)) < 1e-9 * (1 + np.abs(v).max())


def test_relative_equilibrium_velocity_is_generator(fig3_body, fig3_field):
    for sign in (1, -1):
        br = make_regular(fig3_body, fig3_field, 0.07, theta0=0.4, sign=sign, xi2=-120.0)
        a = eom_rhs(fig3_body, fig3_field, br.z0).to_vector()
        g = infinitesimal_generator(br.xi, br.z0).to_vector()
        assert np.abs(a - g).max() < 1e-10 * np.abs(g).max()
    br = make_singular(fig3_body, fig3_field, 7.0, -50.0)
    a = eom_rhs(fig3_body, fig3_field, br.z0).to_vector()
    g = infinitesimal_generator(br.xi, br.z0).to_vector()
    assert np.abs(a - g).max() < 1e-10 * np.abs(g).max()


def test_relative_orbit_composes():
    z = PhasePoint(rot_z(0.3), np.array([1.0, 0, 0]), np.array([0, 0, 1.0]), np.zeros(3))
    xi = VelocityPair(2.0, -1.0)
    a = relative_orbit(relative_orbit(z, xi, 0.4), xi, 0.6)
    b = relative_orbit(z, xi, 1.0)
    assert np.allclose(a.to_vector(), b.to_vector(), atol=1e-14)


def test_augmented_hamiltonian_definition(rng, fig3_body, fig3_field):
    z = _random_point(rng, fig3_field)
    xi = VelocityPair(3.0, -2.0)
    J = momentum_map(z)
    assert math.isclose(augmented_hamiltonian(fig3_body, fig3_field, z, xi),
                        hamiltonian(fig3_body, fig3_field, z) - 3.0 * J.J1 + 2.0 * J.J2,
                        rel_tol=1e-14)


def test_free_symmetric_top():
    """Without a field the body spin and |Pi| are conserved and x moves uniformly."""
    from orbitron.field import StandardField
    body = BodyParams(1.0, 2.0, 1.0, 0.5)
    field = StandardField(0.0, 1.0)
    z0 = PhasePoint(np.eye(3), np.zeros(3), np.array([0.3, -0.1, 0.8]), np.array([0.2, 0, 0]))
    tr = integrate(body, field, z0, 10.0, 1e-3, stride=1000)
    end = tr.point(-1)
    assert abs(end.Pi[2] - 0.8) < 1e-12
    assert abs(np.linalg.norm(end.Pi) - np.linalg.norm(z0.Pi)) < 1e-10
    assert np.allclose(end.A @ end.p, [0.2, 0, 0], atol=1e-10)
    assert np.allclose(end.x, [2.0, 0, 0], atol=1e-9)


def test_integrator_fourth_order(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.06, xi2=-300.0)
    T = 0.02
    exact = relative_orbit(br.z0, br.xi, T).x
    errs = []
    for dt in (4e-4, 2e-4, 1e-4):
        tr = integrate(fig3_body, fig3_field, br.z0, T, dt, stride=10 ** 6)
        errs.append(np.linalg.norm(tr.point(-1).x - exact))
    assert errs[0] / errs[1] > 14 and errs[1] / errs[2] > 14


def test_compiled_matches_python(fig3_body, fig3_field, rng):
    br = make_regular(fig3_body, fig3_field, 0.065, xi2=-300.0)
    z0 = br.z0.perturbed(1e-3 * probe_steps(fig3_body, fig3_field, br.z0) / 1e-5
                         * rng.standard_normal(12))
    for xi in (None, br.xi):
        a = integrate(fig3_body, fig3_field, z0, 0.02, 1e-4, stride=50, xi=xi)
        b = integrate(fig3_body, fig3_field, z0, 0.02, 1e-4, stride=50, xi=xi, compiled=False)
        assert a.states.shape == b.states.shape
        sc = np.abs(a.states).max(axis=0) + 1e-300
        assert (np.abs(a.states - b.states) / sc).max() < 1e-9
        assert np.allclose(a.h, b.h, rtol=1e-9, atol=0)


def test_augmented_flow_fixes_relative_equilibrium(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.07, xi2=-200.0)
    tr = integrate(fig3_body, fig3_field, br.z0, 0.05, 1e-4, stride=100, xi=br.xi)
    assert np.abs(tr.states - br.z0.to_vector()).max() < 1e-9


def test_pole_singularity_is_flagged():
    """A free body coasting up the axis lands exactly on the upper pole."""
    from orbitron.field import StandardField
    body = BodyParams(1.0, 1.0, 1.0, 0.0)
    field = StandardField(1.0, 0.5)
    dt = 2.0 ** -10
    z0 = PhasePoint(np.eye(3), np.array([0, 0, 0.5 - 8 * dt]), np.zeros(3),
                    np.array([0.0, 0.0, 1.0]))
    for compiled in (True, False):
        tr = integrate(body, field, z0, 1.0, dt, compiled=compiled)
        assert tr.flag == "pole_singularity", compiled
        assert len(tr.h) == 8
        assert np.all(np.isfinite(tr.states))


def test_integrate_argument_checks(fig3_body, fig3_field):
    z0 = make_singular(fig3_body, fig3_field, 1.0, 0.0).z0
    with pytest.raises(ValueError):
        integrate(fig3_body, fig3_field, z0, 1.0, 0.0)
    with pytest.raises(ValueError):
        integrate(fig3_body, fig3_field, z0, 1.0, 1e-3, stride=0)


def test_trajectory_rows_layout(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.07)
    tr = integrate(fig3_body, fig3_field, br.z0, 0.01, 1e-4, stride=25)
    rows = list(trajectory_rows(tr))
    assert len(rows) == 5 and all(len(r) == len(TRAJECTORY_COLUMNS) for r in rows)
    assert rows[-1][0] == pytest.approx(0.01)
    assert rows[2][-3] == tr.h[50]
