"""Finite-difference Schroedinger solvers for one and two atoms, the bound-state
threshold search and the bound-state observables.

Reduced units throughout: H = -d^2/dx1^2 - d^2/dx2^2 + U0(x1) + U0(x2)
+ 6 a_dd mu(x1) mu(x2) F(x1 - x2), with mu in units of mu_max.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla

from . import fields as flds
from .core import KINETIC, Grid1D, Grid2D, make_grid
from .interactions import DEFAULT_WIDTH, WIDTH_FACTORS, DipolarModel, build_model, magnetic_moment
from .potentials import potential_grid, u0 as u0_field


class SolverError(RuntimeError):
    pass


class NoBoundState(SolverError):
    pass


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

_STENCILS = {
    2: (2.0, [-1.0]),
    4: (30 / 12, [-16 / 12, 1 / 12]),
}


def kinetic_1d(grid: Grid1D, order: int = 2) -> sp.csr_matrix:
    """-KINETIC d^2/dx^2 on the grid unknowns.

    Dirichlet uses odd reflection through the end points for the ghost values
    of the 4th-order stencil, which only touches the diagonal and keeps the
    matrix symmetric.
    """
    if order not in _STENCILS:
        raise ValueError(f"stencil order must be 2 or 4, got {order}")
    centre, offs = _STENCILS[order]
    m = len(grid.interior)
    h2 = grid.spacing**2
    diag = np.full(m, centre)
    if grid.boundary == "dirichlet" and order == 4:
        # psi_{-1} = -psi_{1}: the second-neighbour term folds onto the first row
        diag[0] -= offs[1]
        diag[-1] -= offs[1]
    mats = [sp.diags(diag, 0, shape=(m, m))]
    for j, c in enumerate(offs, start=1):
        band = np.full(m - j, c)
        mats.append(sp.diags([band, band], [-j, j], shape=(m, m)))
        if grid.boundary == "periodic":
            wrap = np.full(j, c)
            mats.append(sp.diags([wrap, wrap], [m - j, -(m - j)], shape=(m, m)))
    return (KINETIC / h2 * sum(mats[1:], mats[0])).tocsr()


def _on_unknowns(grid: Grid1D, values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape == grid.points.shape:
        values = values[1:-1] if grid.boundary == "dirichlet" else values
    if values.shape != grid.interior.shape:
        raise ValueError(f"potential has {values.size} samples, grid has {grid.n}")
    if not np.all(np.isfinite(values)):
        raise ValueError("potential contains NaN or inf")
    return values


@dataclass(frozen=True)
class Hamiltonian1D:
    grid: Grid1D
    matrix: sp.csr_matrix
    potential: np.ndarray
    order: int = 2

    @property
    def x(self):
        return self.grid.interior


def build_h1(grid: Grid1D, potential, order: int = 2) -> Hamiltonian1D:
    v = _on_unknowns(grid, potential)
    mat = (kinetic_1d(grid, order) + sp.diags(v)).tocsr()
    return Hamiltonian1D(grid, mat, v, order)


@dataclass(frozen=True)
class Hamiltonian2D:
    """Two atoms on a shared axis; index (i, j) -> i * m + j with i for x1."""

    grid: Grid2D
    free: sp.csr_matrix  # kinetic + single-particle potentials
    pair: np.ndarray  # mu(x1) mu(x2) F(x1 - x2), unit strength, flattened
    potential: np.ndarray
    moments: np.ndarray
    model: DipolarModel | None
    a_dd: float
    order: int = 2

    @property
    def matrix(self) -> sp.csr_matrix:
        strength = 6 * KINETIC * self.a_dd
        if strength == 0:
            return self.free
        return (self.free + sp.diags(strength * self.pair)).tocsr()

    @property
    def shape(self):
        m = len(self.grid.axis.interior)
        return (m, m)

    def with_add(self, a_dd: float) -> "Hamiltonian2D":
        return Hamiltonian2D(self.grid, self.free, self.pair, self.potential, self.moments,
                             self.model, float(a_dd), self.order)


def pair_kernel(grid: Grid1D, model: DipolarModel) -> np.ndarray:
    """F(|x1 - x2|) on the 2D unknowns (shape m x m)."""
    x = grid.interior
    m = len(x)
    h = grid.spacing
    sep = np.arange(m) * h
    if sep[-1] > model.nodes[-1] * (1 + 1e-12):
        raise SolverError("dipolar table does not cover the grid separations")
    node_h = model.nodes[1] - model.nodes[0]
    if abs(node_h - h) <= 1e-12 * h:
        per_sep = model.values[:m]
    else:
        per_sep = model.kernel(sep)
    idx = np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
    return per_sep[idx]


def build_h2(grid2: Grid2D, potential, model: DipolarModel, a_dd: float, moments,
             order: int = 2) -> Hamiltonian2D:
    axis = grid2.axis
    v = _on_unknowns(axis, potential)
    mu = _on_unknowns(axis, moments)
    t = kinetic_1d(axis, order) + sp.diags(v)
    eye = sp.identity(len(v), format="csr")
    free = (sp.kron(t, eye) + sp.kron(eye, t)).tocsr()
    pair = (np.outer(mu, mu) * pair_kernel(axis, model)).ravel()
    return Hamiltonian2D(grid2, free, pair, v, mu, model, float(a_dd), order)


# ---------------------------------------------------------------------------
# eigen solvers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundState:
    energy: float
    psi: np.ndarray
    residual: float
    scale: float
    converged: bool


def _lower_bound(mat: sp.spmatrix, h) -> float:
    # the kinetic part is positive semidefinite, so min of the diagonal potential bounds E0 from below
    return float((mat.diagonal() - _kinetic_diagonal(h)).min()) - 1.0


def ground_state(h, seed: int = 0, tol: float = 1e-12, maxiter: int = 20_000,
                 residual_tol: float = 1e-8) -> GroundState:
    """Lowest eigenpair by shift-invert Lanczos (ARPACK) about a rigorous lower bound.

    The shift sits below the whole spectrum, so the eigenvalue nearest to it
    is the ground state.  ``psi`` is reshaped to the grid for 2D operators,
    normalized so sum |psi|^2 = 1, and made positive on average.
    """
    mat = h.matrix.tocsc()
    n = mat.shape[0]
    scale = float(abs(mat).sum(axis=1).max())
    lower = _lower_bound(mat, h)
    rng = np.random.default_rng(seed)
    v0 = rng.uniform(0.5, 1.5, n)
    try:
        w, v = sla.eigsh(mat, k=1, sigma=lower, which="LM", v0=v0, tol=tol, maxiter=maxiter)
    except sla.ArpackNoConvergence as exc:
        raise SolverError(f"eigensolver did not converge: {exc}") from exc
    energy = float(w[0])
    psi = v[:, 0]
    psi = psi / np.linalg.norm(psi)
    if psi.sum() < 0:
        psi = -psi
    residual = float(np.linalg.norm(mat @ psi - energy * psi))
    converged = residual <= residual_tol * scale
    if not converged:
        raise SolverError(f"ground state residual {residual:.3g} above {residual_tol:.1e} x {scale:.3g}")
    if isinstance(h, Hamiltonian2D):
        psi = psi.reshape(h.shape)
    return GroundState(energy, psi, residual, scale, converged)


def _kinetic_diagonal(h) -> np.ndarray:
    if isinstance(h, Hamiltonian2D):
        kd = kinetic_1d(h.grid.axis, h.order).diagonal()
        return (kd[:, None] + kd[None, :]).ravel()
    return kinetic_1d(h.grid, h.order).diagonal()


def dense_spectrum(h, k: int | None = None):
    """Full dense diagonalization; test oracle for small grids."""
    w, v = np.linalg.eigh(h.matrix.toarray())
    if k is not None:
        w, v = w[:k], v[:, :k]
    return w, v


def lowest_states(h, k: int = 3, seed: int = 0):
    """k lowest eigenpairs (optional mode; not used by the threshold search)."""
    mat = h.matrix.tocsc()
    lower = _lower_bound(mat, h)
    v0 = np.random.default_rng(seed).uniform(0.5, 1.5, mat.shape[0])
    w, v = sla.eigsh(mat, k=k, sigma=lower, which="LM", v0=v0, tol=1e-12)
    order = np.argsort(w)
    return w[order], v[:, order]


# ---------------------------------------------------------------------------
# double-barrier bound states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverSettings:
    n: int = 200
    order: int = 2
    width: str = DEFAULT_WIDTH
    rel_tol: float = 1e-2
    seed: int = 0
    a_cap: float = 200.0  # reduced units (1/k)
    distance: str = "rms"  # or "mean"
    coupling_form: str = "symmetric"  # or "cross"
    max_dim: int = 250**2


@dataclass
class BoundProblem:
    """Everything needed to solve the two-atom problem for one (profile, l_T)."""

    profile: object
    l_t: float
    settings: SolverSettings
    grid: Grid1D = field(init=False)
    h: Hamiltonian2D = field(init=False)

    def __post_init__(self):
        s = self.settings
        self.grid = make_grid(0.0, 2 * math.pi / self.profile.k, s.n, "dirichlet")
        grid2 = Grid2D(self.grid, s.max_dim)
        u0 = u0_field(self.grid.points, self.profile)
        mu = magnetic_moment(self.grid.points, self.profile)
        model = build_model(self.l_t, cutoff=self.grid.spacing, width=s.width,
                            x_max=self.grid.x_max - self.grid.x_min, spacing=self.grid.spacing)
        self.h = build_h2(grid2, u0, model, 0.0, mu, s.order)

    def solve(self, a_dd: float) -> GroundState:
        return ground_state(self.h.with_add(a_dd), seed=self.settings.seed)


@dataclass(frozen=True)
class Threshold:
    a_dd_min: float
    a_lo: float
    a_hi: float
    e_lo: float
    e_hi: float
    solves: int
    state: GroundState  # ground state at a_hi (E < 0)


def add_min_bisect(problem: BoundProblem, a_guess: float | None = None) -> Threshold:
    """Smallest a_dd with a negative two-atom ground energy, by bisection on sign(E0).

    The bracket starts at ``a_guess`` (default 0.55 sqrt(eps) lambda) and is
    widened by factors of 2 until E0(a_lo) >= 0 > E0(a_hi), capped at
    ``settings.a_cap``.  Returns a_hi once (a_hi - a_lo)/a_hi <= rel_tol.
    E0 is concave in a_dd (a minimum of linear functions) and E0(0) >= 0, so
    the negative set is a single ray and the sign change is unique even
    though E0 may first rise with a_dd.
    """
    s = problem.settings
    if a_guess is None:
        eps = getattr(problem.profile, "epsilon", 0.1)
        a_guess = 0.55 * math.sqrt(eps) * 2 * math.pi / problem.profile.k
    a_guess = min(a_guess, s.a_cap)
    solves = 0

    def energy(a):
        nonlocal solves
        solves += 1
        gs = problem.solve(a)
        return gs.energy, gs

    e0, _ = energy(0.0)
    if e0 < 0:
        raise SolverError("two-atom ground energy is negative without interactions")
    a = a_guess
    e, gs = energy(a)
    if e >= 0 and a >= s.a_cap:
        raise NoBoundState(f"no bound state for a_dd up to {s.a_cap:g} (1/k)")
    if e < 0:
        hi, e_hi, gs_hi = a, e, gs
        lo, e_lo = 0.0, e0
        while True:
            trial = hi / 2
            et, gt = energy(trial)
            if et >= 0:
                lo, e_lo = trial, et
                break
            hi, e_hi, gs_hi = trial, et, gt
            if hi < 1e-6:
                raise SolverError("bound state persists down to a_dd ~ 0")
    else:
        lo, e_lo = a, e
        while True:
            trial = lo * 2
            if trial > s.a_cap:
                raise NoBoundState(f"no bound state for a_dd up to {s.a_cap:g} (1/k)")
            et, gt = energy(trial)
            if et < 0:
                hi, e_hi, gs_hi = trial, et, gt
                break
            lo, e_lo = trial, et
    while (hi - lo) / hi > s.rel_tol:
        mid = 0.5 * (lo + hi)
        em, gm = energy(mid)
        if em < 0:
            hi, e_hi, gs_hi = mid, em, gm
        else:
            lo, e_lo = mid, em
    return Threshold(a_dd_min=hi, a_lo=lo, a_hi=hi, e_lo=e_lo, e_hi=e_hi, solves=solves, state=gs_hi)


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundStateResult:
    energy_0: float
    psi: np.ndarray
    x_bar: float
    x_bar_mean: float
    x_bar_rms: float
    u_off_bar: float
    gamma_d_bar: float
    tau: float
    u_off_bar_cross: float
    gamma_d_bar_cross: float
    tau_cross: float
    converged: bool
    residual: float
    a_dd: float = math.nan

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("psi")
        return d


def observables(psi, x, u0, u1, omega, gamma: float = 0.0, distance: str = "rms",
                coupling_form: str = "symmetric") -> dict:
    """Averages over |psi(x1, x2)|^2 on the 2D unknowns.

    ``x``, ``u0``, ``u1``, ``omega`` are 1D samples on the axis unknowns;
    ``omega`` must be the absolute total Rabi frequency (reduced).  The
    symmetric form averages the same-point bound sqrt(U0 U1)/2 over both
    atoms; the cross form pairs U0(x1) with U1(x2).
    """
    prob = np.abs(psi) ** 2
    prob = prob / prob.sum()
    sep = np.abs(np.subtract.outer(x, x))
    mean = float((sep * prob).sum())
    rms = float(math.sqrt((sep**2 * prob).sum()))
    rho1, rho2 = prob.sum(axis=1), prob.sum(axis=0)
    g = np.sqrt(u0 * u1) / 2
    loss = u0 * u1 / (4 * omega**2)
    u_off_sym = 0.5 * float(rho1 @ g + rho2 @ g)
    gd_sym = gamma * 0.5 * float(rho1 @ loss + rho2 @ loss)
    u_off_cross = float((prob * np.sqrt(np.outer(u0, u1))).sum()) / 2
    gd_cross = gamma * float((prob * np.outer(u0 / (4 * omega**2), u1)).sum())

    def life(rate):
        return math.inf if rate <= 0 else 1.0 / rate

    if distance not in ("rms", "mean"):
        raise ValueError(f"unknown distance measure {distance!r}")
    if coupling_form not in ("symmetric", "cross"):
        raise ValueError(f"unknown coupling form {coupling_form!r}")
    sym = coupling_form == "symmetric"
    return {
        "x_bar": rms if distance == "rms" else mean,
        "x_bar_mean": mean,
        "x_bar_rms": rms,
        "u_off_bar": u_off_sym if sym else u_off_cross,
        "gamma_d_bar": gd_sym if sym else gd_cross,
        "tau": life(gd_sym if sym else gd_cross),
        "u_off_bar_cross": u_off_cross,
        "gamma_d_bar_cross": gd_cross,
        "tau_cross": life(gd_cross),
    }


def bound_state_result(problem: BoundProblem, gs: GroundState, a_dd: float, gamma: float = 0.0) -> BoundStateResult:
    x = problem.grid.interior
    p = problem.profile
    pg = potential_grid(problem.grid, p)
    sl = slice(1, -1)
    obs = observables(gs.psi, x, pg.u0[sl], pg.u1[sl], pg.omega[sl], gamma,
                      problem.settings.distance, problem.settings.coupling_form)
    return BoundStateResult(energy_0=gs.energy, psi=gs.psi, converged=gs.converged,
                            residual=gs.residual, a_dd=a_dd, **obs)


def barrier_peaks(profile, n_fine: int = 200_001):
    """Numerical U0 peak positions bracketing the well at pi/k (double barrier)."""
    k = profile.k
    x = np.linspace(0, 2 * math.pi / k, n_fine)
    u = u0_field(x, profile)
    c = int(np.argmin(np.abs(x - math.pi / k)))
    left = int(np.argmax(u[:c]))
    right = c + int(np.argmax(u[c:]))
    return float(x[left]), float(x[right]), float(max(u[left], u[right]))


def domain_walls(profile):
    """Positions where f = 1 on either side of the well centre (mu changes sign)."""
    from scipy.optimize import brentq

    k = profile.k
    c = math.pi / k
    g = lambda x: float(flds.ratio(x, profile)) - 1.0
    lo_edge = c - math.pi / k * 0.999
    hi_edge = c + math.pi / k * 0.999
    return brentq(g, lo_edge, c), brentq(g, c, hi_edge)


def geometry_metrics(psi, problem: BoundProblem, band: float | None = None) -> dict:
    """One-in/one-out mass and density near the domain walls.

    ``band`` is the half width around each wall (default 0.02 lambda).
    """
    p = problem.profile
    lam = 2 * math.pi / p.k
    band = 0.02 * lam if band is None else band
    x = problem.grid.interior
    prob = np.abs(psi) ** 2
    prob = prob / prob.sum()
    left, right, _ = barrier_peaks(p)
    inside = (x > left) & (x < right)
    one_out = float(prob[np.logical_xor.outer(inside, inside)].sum())
    walls = domain_walls(p)
    near = np.zeros_like(x, dtype=bool)
    for w in walls:
        near |= np.abs(x - w) <= band
    mask = near[:, None] | near[None, :]
    peak = prob.max()
    near_density = float(prob[mask].max() / peak) if mask.any() else 0.0
    line = max(float(prob[int(np.argmin(np.abs(x - w))), :].max()) for w in walls) / peak
    return {
        "one_in_one_out_mass": one_out,
        "wall_band_density_over_peak": near_density,
        "wall_line_density_over_peak": line,
        "walls": list(walls),
        "walls_over_lambda": [w / lam for w in walls],
        "barrier_peaks": [left, right],
        "band": band,
    }


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

SCAN_COLUMNS = ("epsilon", "d", "l_t_over_sqrt_eps_lambda", "l_t", "a_dd_min", "a_dd_min_over_sqrt_eps_lambda",
                "x_bar", "x_bar_mean", "x_bar_rms", "u_off_bar", "u0_peak", "u_off_over_peak",
                "gamma_d_bar", "tau", "tau_cross", "u_off_bar_cross", "energy_0", "one_in_one_out_mass",
                "wall_band_density_over_peak", "wall_line_density_over_peak", "solves", "status")


@dataclass(frozen=True)
class ScanCell:
    epsilon: float
    d: float
    lt_units: float  # l_T in units of sqrt(eps) lambda
    omega0: float  # reduced Rabi scale
    gamma: float  # reduced linewidth
    settings: SolverSettings


def run_cell(cell: ScanCell) -> dict:
    eps, d = cell.epsilon, cell.d
    profile = flds.double_barrier(eps, d, 0.0, omega0=cell.omega0)
    lam = 2 * math.pi
    l_t = cell.lt_units * math.sqrt(eps) * lam
    row = {"epsilon": eps, "d": d, "l_t_over_sqrt_eps_lambda": cell.lt_units, "l_t": l_t}
    try:
        problem = BoundProblem(profile, l_t, cell.settings)
        th = add_min_bisect(problem)
        res = bound_state_result(problem, th.state, th.a_dd_min, cell.gamma)
        geo = geometry_metrics(th.state.psi, problem)
        peak = barrier_peaks(profile)[2]
        row.update({
            "a_dd_min": th.a_dd_min,
            "a_dd_min_over_sqrt_eps_lambda": th.a_dd_min / (math.sqrt(eps) * lam),
            "x_bar": res.x_bar, "x_bar_mean": res.x_bar_mean, "x_bar_rms": res.x_bar_rms,
            "u_off_bar": res.u_off_bar, "u0_peak": peak, "u_off_over_peak": res.u_off_bar / peak,
            "gamma_d_bar": res.gamma_d_bar, "tau": res.tau, "tau_cross": res.tau_cross,
            "u_off_bar_cross": res.u_off_bar_cross, "energy_0": res.energy_0,
            "one_in_one_out_mass": geo["one_in_one_out_mass"],
            "wall_band_density_over_peak": geo["wall_band_density_over_peak"],
            "wall_line_density_over_peak": geo["wall_line_density_over_peak"],
            "solves": th.solves, "status": "ok",
        })
    except SolverError as exc:
        row.update({c: math.nan for c in SCAN_COLUMNS if c not in row})
        row["solves"] = 0
        row["status"] = f"failed: {exc}"
    return row


def _slope(xs, ys):
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[ok], ys[ok]
    if len(xs) == 0:
        return {"slope_through_origin": math.nan, "slope": math.nan, "intercept": math.nan, "n": 0}
    through = float((xs * ys).sum() / (xs * xs).sum())
    if len(xs) >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
    else:
        slope, intercept = math.nan, math.nan
    return {"slope_through_origin": through, "slope": float(slope), "intercept": float(intercept),
            "n": int(len(xs))}


@dataclass(frozen=True)
class ScanResult:
    rows: list
    fits: dict

    def table(self) -> dict:
        return {c: [r[c] for r in self.rows] for c in SCAN_COLUMNS}


def scan(epsilons, d: float, lt_units, omega0: float, gamma: float,
         settings: SolverSettings = SolverSettings(), threads: int | None = None) -> ScanResult:
    """Threshold search and observables for every (eps, l_T) cell.

    Cells run in separate processes; rows come back sorted by (l_T, eps)
    regardless of completion order.  Per-cell failures are recorded in the
    ``status`` column and the scan carries on.
    """
    cells = [ScanCell(float(e), float(d), float(lt), float(omega0), float(gamma), settings)
             for lt in lt_units for e in sorted(epsilons)]
    threads = threads or min(len(cells), os.cpu_count() or 1) or 1
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    rows.sort(key=lambda r: (r["l_t_over_sqrt_eps_lambda"], r["epsilon"]))
    fits = {}
    for lt in sorted(set(lt_units)):
        sub = [r for r in rows if r["l_t_over_sqrt_eps_lambda"] == lt and r["status"] == "ok"]
        fits[f"{lt:g}"] = {
            "a_vs_x_bar": _slope([r["x_bar"] for r in sub], [r["a_dd_min"] for r in sub]),
            "a_vs_x_bar_mean": _slope([r["x_bar_mean"] for r in sub], [r["a_dd_min"] for r in sub]),
            "a_vs_x_bar_rms": _slope([r["x_bar_rms"] for r in sub], [r["a_dd_min"] for r in sub]),
            "a_over_sqrt_eps_lambda": [r["a_dd_min_over_sqrt_eps_lambda"] for r in sub],
        }
    return ScanResult(rows=rows, fits=fits)
