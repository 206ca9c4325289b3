import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from darkbarrier import fields as F

PROFILES = [
    F.double_barrier(0.1),
    F.double_barrier(0.05, 0.4),
    F.double_barrier(0.1, 0.8, 0.2),
    F.triple_barrier(0.2),
    F.FieldProfile(1.0, 0.3, 2.0, 1.0, 1.5, 0.7, 0.9, label="raw"),
]


def test_double_barrier_examples():
    p = F.double_barrier(0.1)
    assert F.rabi_coupling(math.pi, p) == pytest.approx(0.0, abs=1e-15)
    x = np.linspace(0, 2 * math.pi, 17)
    np.testing.assert_allclose(F.rabi_probe(x, p), 0.1)
    assert F.ratio(0.0, p) == pytest.approx(20.0)
    assert F.ratio(math.pi, p) == pytest.approx(0.0, abs=1e-15)
    assert F.omega_norm(math.pi, p) == pytest.approx(0.1)
    assert F.log_derivative(math.pi, p) == pytest.approx(0.0, abs=1e-12)
    assert F.alpha_prime(math.pi, p) == pytest.approx(0.0, abs=1e-12)


def test_triple_barrier_examples():
    phi = 0.2
    p = F.triple_barrier(phi)
    assert F.rabi_probe(math.pi - phi, p) == pytest.approx(0.0, abs=1e-15)
    assert F.ratio(math.pi - phi / 2, p) == pytest.approx(1.0, rel=1e-12)
    # common zero of both fields is absent for this profile; the pole sits at kx = pi - phi
    assert np.isinf(F.ratio(math.pi - phi, p))
    assert F.mixing_angle(math.pi - phi, p) == pytest.approx(math.pi / 2)


def test_alpha_prime_at_triple_centre():
    # independent evaluation of the closed-form quotient at the central peak
    for phi in (0.1, 0.2):
        p = F.triple_barrier(phi)
        xc = math.pi - phi / 2
        kx = xc
        ref = (math.sin(kx + phi) - math.sin(kx) + math.sin(phi)) / (
            (1 + math.cos(kx)) ** 2 + (1 + math.cos(kx + phi)) ** 2)
        assert abs(F.alpha_prime(xc, p)) == pytest.approx(abs(ref), rel=1e-12)
        assert abs(ref) == pytest.approx(4 / phi, rel=0.01)


def test_triple_matches_closed_form_pointwise():
    phi = 0.3
    p = F.triple_barrier(phi)
    x = np.linspace(0.01, 2 * math.pi - 0.01, 997)
    ref = F.triple_barrier_alpha_prime(x, phi)
    got = F.alpha_prime(x, p)
    # alpha = arctan(Oc/Op) and the closed form differ at most by an overall sign;
    # skip the exact zeros of alpha' where a relative error is meaningless
    keep = np.abs(ref) > 1e-6
    assert np.max(np.abs(np.abs(got[keep]) - np.abs(ref[keep])) / np.abs(ref[keep])) < 1e-10


def test_mixing_angle_values():
    p = F.FieldProfile(1.0, 1.0, a=1.0, b=0.0, c=1.0, d=0.0)
    assert F.mixing_angle(0.0, p) == pytest.approx(math.pi / 4)
    assert F.mixing_angle(math.pi, F.double_barrier(0.1)) == pytest.approx(0.0, abs=1e-15)


class _Unchecked:
    """Cosine-series fields without the Omega > 0 guard, to reach the 0/0 branch of ratio."""

    def __init__(self, a, b, c, d, phi):
        self.a, self.b, self.c, self.d, self.phi = a, b, c, d, phi

    def coupling(self, x):
        return self.a + self.b * np.cos(x)

    def probe(self, x):
        return self.c + self.d * np.cos(np.asarray(x) + self.phi)

    def coupling_prime(self, x):
        return -self.b * np.sin(x)

    def probe_prime(self, x):
        return -self.d * np.sin(np.asarray(x) + self.phi)


def test_common_zero_lhopital():
    # Oc = cos x and Op = 2 cos x vanish together at pi/2; the limit is 1/2
    p = _Unchecked(0.0, 1.0, 0.0, 2.0, 0.0)
    assert F.ratio(math.pi / 2, p) == pytest.approx(0.5)
    # Oc = 1 + cos x = Op: the (rounded) derivative ratio gives the exact limit 1
    assert F.ratio(math.pi, _Unchecked(1.0, 1.0, 1.0, 1.0, 0.0)) == pytest.approx(1.0)
    # both fields identically zero: no limit exists
    with pytest.raises(F.ProfileError):
        F.ratio(1.0, _Unchecked(0.0, 0.0, 0.0, 0.0, 0.0))
    with pytest.raises(F.ProfileError):
        F.FieldProfile(1.0, 2.0, 1.0, 1.0, 1.0, 1.0)


def test_profile_invariant_rejected():
    with pytest.raises(F.ProfileError):
        F.FieldProfile(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0)
    with pytest.raises(F.ProfileError):
        F.double_barrier(0.1, d=1.0)
    with pytest.raises(F.ProfileError):
        F.triple_barrier(0.0)


def test_ratio_lhopital_removable_point():
    # Oc = 1 + cos x and Op = sin-like zero built from c + d cos(x + phi) with c = d, phi = pi/2:
    # Op = 1 + cos(x + pi/2) = 1 - sin x, zero at x = pi/2 where Oc = 1 -> pole, not removable.
    p = F.FieldProfile(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, math.pi / 2)
    assert np.isinf(F.ratio(math.pi / 2, p))


@given(st.floats(0.1, 10.0), st.integers(0, len(PROFILES) - 1))
def test_scale_invariance(scale, i):
    p = PROFILES[i]
    q = p.scaled(scale)
    x = np.random.default_rng(i).uniform(0, 2 * math.pi, 1000)
    np.testing.assert_allclose(F.ratio(x, q), F.ratio(x, p), rtol=1e-12)
    np.testing.assert_allclose(F.alpha_prime(x, q), F.alpha_prime(x, p), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(F.log_derivative(x, q), F.log_derivative(x, p), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("p", PROFILES, ids=lambda p: p.label)
def test_periodicity(p):
    x = np.linspace(0, 2 * math.pi, 501)[:-1] + 0.123
    for fn in (F.alpha_prime, F.log_derivative, F.omega_norm):
        np.testing.assert_allclose(fn(x + 2 * math.pi, p), fn(x, p), rtol=1e-9, atol=1e-9)
    f0, f1 = F.ratio(x, p), F.ratio(x + 2 * math.pi, p)
    np.testing.assert_allclose(f1, f0, rtol=1e-9)


def _order(errs, hs):
    return np.polyfit(np.log(hs), np.log(errs), 1)[0]


@pytest.mark.parametrize("p", PROFILES, ids=lambda p: p.label)
def test_derivative_order(p):
    x = np.random.default_rng(1).uniform(0, 2 * math.pi, 50)
    hs = np.array([2e-3, 1e-3, 5e-4])
    e_alpha, e_log = [], []
    for h in hs:
        fd = (F.mixing_angle(x + h, p) - F.mixing_angle(x - h, p)) / (2 * h)
        # mod pi branch jumps cannot occur at these offsets except at poles, which arctan2 handles
        fd = np.where(np.abs(fd) > 1 / h, fd - np.sign(fd) * math.pi / (2 * h), fd)
        e_alpha.append(np.max(np.abs(fd - F.alpha_prime(x, p))))
        lfd = (np.log(F.omega_norm(x + h, p)) - np.log(F.omega_norm(x - h, p))) / (2 * h)
        e_log.append(np.max(np.abs(lfd - F.log_derivative(x, p))))
    assert _order(e_alpha, hs) >= 1.9
    assert _order(e_log, hs) >= 1.9


def test_double_local_model():
    for eps, d in ((0.01, 0.0), (0.02, 0.5), (0.005, 0.2)):
        u = eps * (1 - d)
        p = F.double_barrier(eps, d)
        x = math.pi + np.linspace(-math.sqrt(u), math.sqrt(u), 201)
        x = x[np.abs(x - math.pi) > 1e-6]
        exact = F.alpha_prime(x, p)
        model = F.double_barrier_local_alpha_prime(x, eps, d)
        assert np.max(np.abs(np.abs(exact) - np.abs(model)) / np.abs(model)) < 0.05


def test_linear_approx():
    p = F.linear_approx(0.1, 1, x0=0.0)
    x = np.linspace(-1, 1, 101)
    np.testing.assert_allclose(F.ratio(x, p), x / 0.1)
    # alpha' = (1/eps) / (1 + (x/eps)^2)
    np.testing.assert_allclose(F.alpha_prime(x, p), 10 / (1 + (10 * x) ** 2), rtol=1e-12)
    q = F.linear_approx(0.1, 2, x0=0.0)
    assert F.alpha_prime(0.0, q) == 0.0
