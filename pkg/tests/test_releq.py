import math

import numpy as np
import pytest

from orbitron.dynamics import BodyParams, VelocityPair
from orbitron.errors import SignConstraint
from orbitron.field import ConstantProfileField, EquatorialProfile
from orbitron.releq import (RelEqBranch, canonical, criticality, is_closed, make_regular,
                            make_singular, releq_residual, scaled_residual, xi1_generalized,
                            xi1_standard)

from conftest import random_body, random_profile, random_standard


def _bisect(g, a, b, tol=1e-15):
    fa = g(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = g(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
        if b - a < tol * abs(m):
            break
    return 0.5 * (a + b)


def test_xi1_standard_fig3_matches_root_find(fig3_body, fig3_field):
    """Oracle: the radial force balance solved numerically from the residual."""
    b, f, r = fig3_body, fig3_field, 0.06
    w, wm = xi1_standard(b, f, r)
    assert wm == -w

    def radial(xi1):
        z = make_regular(b, f, r, xi2=0.0).z0
        z = type(z)(z.A, z.x, b.I3 * xi1 * np.array([0, 0, 1.0]),
                    b.M * xi1 * np.array([0, r, 0.0]))
        return releq_residual(b, f, z, VelocityPair(xi1, 0.0)).pos[0]

    root = _bisect(radial, 1.0, 1000.0)
    assert math.isclose(w, root, rel_tol=1e-9)
    assert w > 0


def test_xi1_standard_sign_constraint(fig3_body, fig3_field):
    b = BodyParams(fig3_body.M, fig3_body.I1, fig3_body.I3, -fig3_body.mu)
    with pytest.raises(SignConstraint):
        xi1_standard(b, fig3_field, 0.06)
    with pytest.raises(SignConstraint):
        make_regular(b, fig3_field, 0.06)
    with pytest.raises(ValueError):
        xi1_standard(fig3_body, fig3_field, 0.0)


def test_xi1_standard_decays(fig3_body, fig3_field):
    ws = [xi1_standard(fig3_body, fig3_field, r)[0] for r in np.geomspace(0.01, 100, 40)]
    assert all(a > b for a, b in zip(ws, ws[1:])) and ws[-1] < 1e-3 * ws[0]


def test_xi1_generalized_examples(fig3_body, fig3_field):
    for r in (0.03, 0.06, 0.1):
        a = xi1_standard(fig3_body, fig3_field, r)[0]
        b = xi1_generalized(fig3_body, fig3_field.profile(r))[0]
        assert math.isclose(a, b, rel_tol=1e-12)
    body = BodyParams(2.0, 1.0, 1.0, 0.5)
    assert xi1_generalized(body, EquatorialProfile(0.0, -2.0, 0.0, 0.0)) == (1.0, -1.0)
    with pytest.raises(SignConstraint):
        xi1_generalized(body, EquatorialProfile(0.0, 2.0, 0.0, 0.0))


def test_constructed_branches_close(rng, fig3_body, fig3_field):
    for r in np.linspace(0.02, 0.2, 10):
        for sign in (1, -1):
            br = make_regular(fig3_body, fig3_field, r, theta0=rng.uniform(0, 6), sign=sign,
                              xi2=rng.uniform(-500, 500))
            assert scaled_residual(fig3_body, fig3_field, br.z0, br.xi) < 1e-10
            assert is_closed(br, fig3_body, fig3_field)
    for _ in range(20):
        body = random_body(rng)
        field = random_standard(rng, body)
        br = make_regular(body, field, rng.uniform(0.1, 3.0), xi2=rng.normal())
        assert is_closed(br, body, field)


def test_singular_branch_any_xi1(rng, fig3_body, fig3_field):
    for xi1 in (-50.0, 0.0, 3.0, 1e3):
        br = make_singular(fig3_body, fig3_field, xi1, rng.uniform(-100, 100))
        res = releq_residual(fig3_body, fig3_field, br.z0, br.xi).as_vector()
        assert np.abs(res).max() < 1e-12 * max(1.0, abs(xi1))
        assert br.kind == "singular" and br.r == 0.0


def test_perturbed_pi_shows_in_angular_residual(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.06)
    dPi = np.array([0.0, 0.0, 1e-3 * fig3_body.I3])
    z = type(br.z0)(br.z0.A, br.z0.x, br.z0.Pi + dPi, br.z0.p)
    res = releq_residual(fig3_body, fig3_field, z, br.xi)
    assert math.isclose(res.ang[2], 1e-3, rel_tol=1e-6)
    assert np.abs(res.lin).max() < 1e-12


def test_generalized_branch_agrees_with_standard(fig3_body, fig3_field):
    r = 0.07
    prof = fig3_field.profile(r)
    a = make_regular(fig3_body, fig3_field, r, xi2=10.0)
    b = make_regular(fig3_body, ConstantProfileField(prof, r), r, xi2=10.0)
    assert b.field_kind == "generalized" and a.field_kind == "standard"
    assert math.isclose(a.xi.xi1, b.xi.xi1, rel_tol=1e-12)
    assert np.allclose(a.z0.to_vector(), b.z0.to_vector(), rtol=1e-12, atol=0)
    assert is_closed(b, fig3_body, ConstantProfileField(prof, r))


def test_generalized_random_profiles_close(rng):
    for _ in range(20):
        body = random_body(rng)
        r = rng.uniform(0.2, 2.0)
        field = ConstantProfileField(random_profile(rng, body), r)
        br = make_regular(body, field, r, xi2=rng.normal())
        assert is_closed(br, body, field)


def test_fd_gradient_vanishes_at_branch_points(rng, fig3_body, fig3_field):
    for _ in range(10):
        br = make_regular(fig3_body, fig3_field, rng.uniform(0.03, 0.15),
                          theta0=rng.uniform(0, 6), sign=int(rng.choice([-1, 1])),
                          xi2=rng.uniform(-400, 400))
        assert criticality(fig3_body, fig3_field, br.z0, br.xi) < 1e-6
        br = make_singular(fig3_body, fig3_field, rng.uniform(-50, 50), rng.uniform(-400, 400))
        assert criticality(fig3_body, fig3_field, br.z0, br.xi) < 1e-6


def test_fd_gradient_detects_wrong_velocity(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.06)
    wrong = VelocityPair(1.01 * br.xi.xi1, br.xi.xi2)
    assert criticality(fig3_body, fig3_field, br.z0, wrong) > 1e-3


def test_canonical_and_serialization(fig3_body, fig3_field):
    br = make_regular(fig3_body, fig3_field, 0.06, theta0=1.1, xi2=5.0)
    c = canonical(br)
    assert np.allclose(c.z0.A, np.eye(3), atol=1e-15) and c.theta0 == 0.0
    assert is_closed(c, fig3_body, fig3_field)
    again = RelEqBranch.from_dict(br.to_dict())
    assert np.array_equal(again.z0.to_vector(), br.z0.to_vector()) and again.xi == br.xi
    with pytest.raises(ValueError):
        RelEqBranch(br.z0, br.xi, "regular", "standard", 0.0, 0.0, 1)
