import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from darkbarrier import adiabatic as A
from darkbarrier import fields as F


def test_probe_off_gives_g2_dark():
    p = F.FieldProfile(1.0, 1.0, a=1.0, b=0.0, c=1.0, d=1.0, phi=0.0)
    es = A.eigensystem(math.pi, p)  # probe 1 + cos(pi) = 0
    np.testing.assert_allclose(es.dark, [0.0, 1.0, 0.0], atol=1e-15)


def test_symmetric_resonant_case():
    p = F.FieldProfile(2.0, 2.0, a=1.0, b=0.0, c=1.0, d=0.0)
    es = A.eigensystem(0.3, p, 0.0)
    np.testing.assert_allclose(es.dark, np.array([-1, 1, 0]) / math.sqrt(2), atol=1e-15)
    omega = 2 * math.sqrt(2)
    assert es.energy_plus == pytest.approx(omega / 2)
    assert es.energy_minus == pytest.approx(-omega / 2)
    assert es.c_factor == 0.0
    assert es.n_plus == pytest.approx(1 / math.sqrt(2))
    assert es.n_minus == pytest.approx(1 / math.sqrt(2))


def test_degenerate_rejected():
    class Zero:
        def coupling(self, x):
            return 0.0

        def probe(self, x):
            return 0.0

    from darkbarrier.fields import ProfileError
    with pytest.raises(ProfileError):
        A.eigensystem(0.0, Zero())


@given(st.floats(0, 2 * math.pi), st.floats(-50, 50), st.floats(0.01, 0.5), st.floats(0, 0.9), st.floats(-1, 1))
def test_eigen_invariants(x, delta, eps, d, phi):
    p = F.double_barrier(eps, d, phi, omega0=7.0)
    es = A.eigensystem(x, p, delta)
    vecs = np.array([es.dark, es.bright_plus, es.bright_minus])
    np.testing.assert_allclose(vecs @ vecs.T, np.eye(3), atol=1e-12)
    assert es.dark[2] == 0.0 and es.dark[1] >= 0
    h = A.internal_hamiltonian(float(p.coupling(x)), float(p.probe(x)), delta)
    scale = max(es.omega, abs(delta))
    assert np.linalg.norm(h @ es.dark) <= 1e-12 * scale
    assert np.linalg.norm(h @ es.bright_plus - es.energy_plus * es.bright_plus) <= 1e-12 * scale
    assert np.linalg.norm(h @ es.bright_minus - es.energy_minus * es.bright_minus) <= 1e-12 * scale
    root = math.sqrt(es.omega**2 + delta**2)
    assert es.omega_plus == pytest.approx(-delta + root, rel=1e-9, abs=1e-12 * scale)
    assert es.omega_minus == pytest.approx(-delta - root, rel=1e-9, abs=1e-12 * scale)
    assert 0 < es.n_plus <= 1 and 0 < es.n_minus <= 1
    assert abs(es.c_factor) <= 0.25 + 1e-15
    assert A.self_check(es, p, tol=1e-10) <= 1e-10
    # population consistency
    pg1 = A.population_g1(x, p)
    assert pg1 == pytest.approx(es.dark[0] ** 2, abs=1e-12)
    assert pg1 + es.dark[1] ** 2 == pytest.approx(1.0, abs=1e-12)


def test_population_values():
    p = F.double_barrier(0.1)
    assert A.population_g1(math.pi, p) == 1.0
    q = F.triple_barrier(0.2)
    assert A.population_g1(math.pi - 0.1, q) == pytest.approx(0.5)
    assert A.population_g1(math.pi - 0.2, q) == 0.0


def test_population_monotone_between_extrema():
    p = F.double_barrier(0.1)
    x = np.linspace(0, 2 * math.pi, 4001)
    pg = A.population_g1(x, p)
    # f decreases on (0, pi) and increases on (pi, 2pi)
    assert np.all(np.diff(pg[x <= math.pi]) >= -1e-15)
    assert np.all(np.diff(pg[x >= math.pi]) <= 1e-15)


def test_gap_examples():
    p = F.double_barrier(0.1, omega0=1.0)
    assert A.dark_energy_gap(math.pi, p, 0.0) == pytest.approx(0.05)
    q = F.FieldProfile(0.2, 0.2, a=1.0, b=0.0, c=0.0, d=0.0)  # Omega = 0.2 uniform, probe off
    assert A.dark_energy_gap(0.0, q, 0.0) == pytest.approx(0.1)
    big = 1e6
    assert A.dark_energy_gap(0.0, q, big) == pytest.approx(0.2**2 / (4 * big), rel=1e-6)
    assert A.dark_energy_gap(0.0, q, -big) == pytest.approx(0.2**2 / (4 * big), rel=1e-6)
