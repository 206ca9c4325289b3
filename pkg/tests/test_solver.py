import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, strategies as st

from darkbarrier import fields as F
from darkbarrier import solver as S
from darkbarrier.core import Grid2D, make_grid
from darkbarrier.interactions import build_model, magnetic_moment
from darkbarrier.potentials import u0


def _harmonic(omega, n, order):
    g = make_grid(-8 / math.sqrt(omega), 8 / math.sqrt(omega), n)
    # m = 1/2 in reduced units, so (1/2) m w^2 x^2 = w^2 x^2 / 4
    return S.build_h1(g, 0.25 * omega**2 * g.points**2, order)


def _small_h2(n=42, l_t=0.1, a_dd=0.3, eps=0.1):
    p = F.double_barrier(eps, 0.0)
    g = make_grid(0.0, 2 * math.pi, n)
    model = build_model(l_t, cutoff=g.spacing, x_max=2 * math.pi, spacing=g.spacing)
    return S.build_h2(Grid2D(g), u0(g.points, p), model, a_dd, magnetic_moment(g.points, p))


# -- one atom ---------------------------------------------------------------

@pytest.mark.parametrize("length", [1.0, 3.0, 10.0])
def test_particle_in_box(length):
    g = make_grid(0.0, length, 400)
    e = S.ground_state(S.build_h1(g, np.zeros(400))).energy
    assert e == pytest.approx(math.pi**2 / length**2, rel=5e-3)


@pytest.mark.parametrize("omega", [0.5, 1.0, 7.0])
def test_harmonic_levels(omega):
    w, _ = S.lowest_states(_harmonic(omega, 600, 2), 2)
    assert np.all(np.abs(w - (np.arange(2) + 0.5) * omega) <= 1e-4 * omega)
    w4, _ = S.lowest_states(_harmonic(omega, 600, 4), 4)
    assert np.all(np.abs(w4 - (np.arange(4) + 0.5) * omega) <= 1e-6 * omega)


@pytest.mark.parametrize("order, floor", [(2, 1.9), (4, 3.8)])
def test_convergence_order(order, floor):
    errs = [abs(S.ground_state(_harmonic(1.0, n, order)).energy - 0.5) for n in (101, 201, 401)]
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(rates) >= floor


def test_in_well_state_near_uncertainty_estimate():
    eps = 0.1
    p = F.double_barrier(eps, 0.0)
    g = make_grid(0, 2 * math.pi, 2001)
    w, v = S.lowest_states(S.build_h1(g, u0(g.points, p)), 20)
    left, right, _ = S.barrier_peaks(p)
    inside = (g.interior > left) & (g.interior < right)
    i = int(np.argmax((v[inside] ** 2).sum(axis=0)))
    assert 0.5 <= w[i] * eps <= 2.0


def test_kinetic_operator_properties():
    for boundary in ("dirichlet", "periodic"):
        for order in (2, 4):
            g = make_grid(0, 1, 30, boundary)
            t = S.kinetic_1d(g, order)
            assert (t - t.T).nnz == 0
            assert np.linalg.eigvalsh(t.toarray()).min() >= -1e-9
    with pytest.raises(ValueError):
        S.kinetic_1d(make_grid(0, 1, 10), 3)


def test_periodic_free_particle_zero_mode():
    g = make_grid(0, 2 * math.pi, 64, "periodic")
    w, _ = S.dense_spectrum(S.build_h1(g, np.zeros(64)), 3)
    assert w[0] == pytest.approx(0.0, abs=1e-10)
    assert w[1] == pytest.approx(w[2], rel=1e-10)


def test_potential_rejects_nan_and_bad_shape():
    g = make_grid(0, 1, 20)
    bad = np.zeros(20)
    bad[5] = np.nan
    with pytest.raises(ValueError):
        S.build_h1(g, bad)
    with pytest.raises(ValueError):
        S.build_h1(g, np.zeros(7))


def test_ground_state_deterministic():
    h = _harmonic(1.0, 300, 2)
    a, b = S.ground_state(h, seed=3), S.ground_state(h, seed=3)
    assert a.energy == b.energy
    assert np.array_equal(a.psi, b.psi)
    assert np.linalg.norm(a.psi) == pytest.approx(1.0, abs=1e-12)
    assert a.psi.sum() > 0


# -- two atoms ---------------------------------------------------------------

def test_separable_two_atom_energy():
    p = F.double_barrier(0.1, 0.0)
    g = make_grid(0, 2 * math.pi, 120)
    e1 = S.ground_state(S.build_h1(g, u0(g.points, p))).energy
    model = build_model(0.1, cutoff=g.spacing, spacing=g.spacing)
    h2 = S.build_h2(Grid2D(g), u0(g.points, p), model, 0.0, magnetic_moment(g.points, p))
    assert S.ground_state(h2).energy == pytest.approx(2 * e1, rel=1e-8)


def test_swap_symmetry_exact():
    h = _small_h2()
    m = h.shape[0]
    idx = np.arange(m * m).reshape(m, m).T.ravel()
    perm = sp.csr_matrix((np.ones(m * m), (np.arange(m * m), idx)))
    mat = h.matrix
    assert abs(perm @ mat @ perm.T - mat).max() == 0
    assert (mat - mat.T).nnz == 0


def test_dense_matches_iterative():
    h = _small_h2(n=42)
    assert h.shape == (40, 40)
    w, _ = S.dense_spectrum(h, 1)
    assert S.ground_state(h).energy == pytest.approx(w[0], rel=1e-8)


def test_energy_concave_and_monotone_past_turnover():
    # E0(a) is a minimum over states of linear functions of a, hence concave;
    # it can rise at first (equal moments outside the well repel side by side)
    h = _small_h2(n=62, a_dd=0.0)
    ladder = np.linspace(0.0, 3.2, 9)
    e = np.array([S.ground_state(h.with_add(a)).energy for a in ladder])
    assert np.all(e[:-2] - 2 * e[1:-1] + e[2:] <= 1e-9)
    top = int(np.argmax(e))
    tail = e[top:top + 5]
    assert len(tail) == 5 and np.all(np.diff(tail) <= 1e-12)
    assert e[-1] < 0 < e[0]


def test_ground_state_invariants():
    h = _small_h2(n=62, a_dd=1.0)
    gs = S.ground_state(h)
    prob = gs.psi**2
    assert prob.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(prob - prob.T)) <= 1e-8
    assert gs.residual <= 1e-8 * gs.scale


def test_table_coverage_gap_rejected():
    g = make_grid(0, 2 * math.pi, 30)
    short = build_model(0.1, x_max=1.0, spacing=0.01)
    with pytest.raises(S.SolverError):
        S.pair_kernel(g, short)


# -- observables ---------------------------------------------------------------

def test_observables_diagonal_limit():
    x = np.linspace(0, 1, 11)
    psi = np.eye(11)
    obs = S.observables(psi, x, np.ones(11), np.ones(11), np.ones(11), gamma=0.0)
    assert obs["x_bar_mean"] == 0.0 and obs["x_bar_rms"] == 0.0
    assert obs["tau"] == math.inf


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(1.0, 100.0), st.floats(0.01, 1.0))
def test_observables_uniform_fields(a, b, om, gamma):
    x = np.linspace(0, 1, 7)
    psi = np.random.default_rng(0).uniform(0.1, 1, (7, 7))
    psi = psi + psi.T
    one = np.ones(7)
    obs = S.observables(psi, x, a * one, b * one, om * one, gamma)
    assert obs["u_off_bar"] == pytest.approx(math.sqrt(a * b) / 2, rel=1e-12)
    assert obs["u_off_bar_cross"] == pytest.approx(math.sqrt(a * b) / 2, rel=1e-12)
    assert obs["tau"] == pytest.approx(4 * om**2 / (gamma * a * b), rel=1e-12)
    assert obs["x_bar_mean"] <= obs["x_bar_rms"] + 1e-15


def test_observables_reject_unknown_modes():
    x = np.linspace(0, 1, 3)
    with pytest.raises(ValueError):
        S.observables(np.eye(3), x, x, x, x + 1, distance="median")
    with pytest.raises(ValueError):
        S.observables(np.eye(3), x, x, x, x + 1, coupling_form="other")


# -- threshold -----------------------------------------------------------------

def test_bisection_bracket_and_threshold():
    settings = S.SolverSettings(n=80, rel_tol=2e-2)
    problem = S.BoundProblem(F.double_barrier(0.1, 0.0), 0.0, settings)
    th = S.add_min_bisect(problem)
    assert th.e_lo >= 0 > th.e_hi
    assert (th.a_hi - th.a_lo) / th.a_hi <= settings.rel_tol
    assert th.a_dd_min > 0
    assert th.state.energy < 0 and abs(th.state.energy) < 1.0


def test_no_bound_state_below_cap():
    settings = S.SolverSettings(n=60, a_cap=0.05)
    problem = S.BoundProblem(F.double_barrier(0.1, 0.0), 0.0, settings)
    with pytest.raises(S.NoBoundState):
        S.add_min_bisect(problem, a_guess=0.01)


def test_domain_walls_where_ratio_is_one():
    p = F.double_barrier(0.1, 0.0)
    lo, hi = S.domain_walls(p)
    assert float(F.ratio(lo, p)) == pytest.approx(1.0, abs=1e-9)
    assert lo < math.pi < hi
    assert (lo + hi) / 2 == pytest.approx(math.pi, abs=1e-9)


def test_scan_rows_sorted_and_failures_recorded():
    settings = S.SolverSettings(n=50, a_cap=1e-3)
    res = S.scan([0.1, 0.05], 0.0, [0.0], omega0=100.0, gamma=0.0, settings=settings, threads=1)
    assert len(res.rows) == 2
    assert [r["epsilon"] for r in res.rows] == [0.05, 0.1]
    assert all(r["status"].startswith("failed") for r in res.rows)
    assert res.fits["0"]["a_vs_x_bar"]["n"] == 0
