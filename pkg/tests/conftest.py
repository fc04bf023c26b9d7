import numpy as np
import pytest

from orbitron.constants import FIG3
from orbitron.dynamics import BodyParams
from orbitron.field import EquatorialProfile, StandardField


@pytest.fixture
def fig3_body():
    return BodyParams(FIG3["M"], FIG3["I1"], FIG3["I3"], FIG3["mu"])


@pytest.fixture
def fig3_field():
    return StandardField(FIG3["q"], FIG3["h"], FIG3["mu0"])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_body(rng, mu_sign=None):
    s = mu_sign if mu_sign is not None else rng.choice([-1.0, 1.0])
    return BodyParams(*rng.uniform(0.5, 2.0, 3), float(s * rng.uniform(0.5, 2.0)))


def random_standard(rng, body):
    """Two-pole field with mu*q < 0 and order-one scales."""
    return StandardField(-np.sign(body.mu) * rng.uniform(0.5, 2.0) * 1e6, rng.uniform(0.5, 2.0))


def random_profile(rng, body=None, existence=True):
    vals = rng.choice([-1.0, 1.0], 4) * rng.uniform(0.5, 2.0, 4)
    prof = EquatorialProfile(*vals)
    if existence and body is not None and body.mu * prof.f1p >= 0:
        prof = EquatorialProfile(prof.f0, -prof.f1p, prof.f1pp, prof.f2pp)
    return prof


def random_rotation(rng):
    from orbitron.lie import exp_so3
    return exp_so3(rng.normal(size=3) * 2.0)


ACCEPTANCE_LINES = []


def report_criterion(number, ok, detail):
    """Record a criterion line for the end-of-run summary and echo it."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
