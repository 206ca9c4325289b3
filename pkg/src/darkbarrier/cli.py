"""Command-line front end.

    darkbarrier <command> --config run.yaml [--out DIR] [--format csv,json,svg] [--threads N] [--seed N]

Commands: profile, potential, features, boundstate, scan, experiment.
Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O failure.
The configuration schema is documented in README.md; unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields as dc_fields
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import features as feat
from . import fields as flds
from . import potentials as pot
from . import solver as slv
from . import svg
from .adiabatic import population_g1
from .core import (H_PLANCK, MU_B, SPECIES_PRESETS, AtomSpecies, json_text, make_grid, reduced_to_si,
                   si_to_reduced, table_csv, write_text)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
FORMATS = ("csv", "json", "svg")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration schema
# ---------------------------------------------------------------------------

def _number(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.replace(" ", "")))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{where}: expected a number or a fraction like 1/40, got {value!r}")


@dataclass(frozen=True)
class SpeciesCfg:
    preset: str = "Yb171"
    wavelength_nm: float = 532.0
    gamma_khz: float | None = None  # value v means 2 pi x v kHz
    mu_max_bohr: float | None = None

    def build(self) -> AtomSpecies:
        if self.preset not in SPECIES_PRESETS:
            raise ConfigError(f"species.preset: unknown {self.preset!r}; choose from {sorted(SPECIES_PRESETS)}")
        base = SPECIES_PRESETS[self.preset](wavelength=self.wavelength_nm * 1e-9)
        gamma = base.gamma if self.gamma_khz is None else 2 * math.pi * self.gamma_khz * 1e3
        mu = base.mu_max if self.mu_max_bohr is None else self.mu_max_bohr * MU_B
        return AtomSpecies(base.name, base.mass, gamma, base.wavelength, mu)


@dataclass(frozen=True)
class LaserCfg:
    omega0_mhz: float = 100.0  # Rabi scale, 2 pi x MHz
    delta_mhz: float = 0.0


@dataclass(frozen=True)
class ProfileCfg:
    preset: str = "double_barrier"  # double_barrier | triple_barrier | linear_approx | raw
    epsilon: float | None = None
    d: float | None = None
    phi: float | None = None
    n: int | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None

    _ALLOWED = {
        "double_barrier": {"epsilon", "d", "phi"},
        "triple_barrier": {"phi"},
        "linear_approx": {"epsilon", "n"},
        "raw": {"epsilon", "a", "b", "c", "d", "phi"},
    }

    def build(self, omega0: float) -> object:
        allowed = self._ALLOWED.get(self.preset)
        if allowed is None:
            raise ConfigError(f"profile.preset: unknown {self.preset!r}; choose from {sorted(self._ALLOWED)}")
        given = {f.name for f in dc_fields(self) if f.name != "preset" and getattr(self, f.name) is not None}
        extra = given - allowed
        if extra:
            raise ConfigError(f"profile: keys {sorted(extra)} do not apply to preset {self.preset!r}")
        try:
            if self.preset == "double_barrier":
                return flds.double_barrier(self._need("epsilon"), self.d or 0.0, self.phi or 0.0, omega0)
            if self.preset == "triple_barrier":
                return flds.triple_barrier(self._need("phi"), omega0)
            if self.preset == "linear_approx":
                return flds.linear_approx(self._need("epsilon"), int(self.n or 1), omega0, x0=math.pi)
            eps = self._need("epsilon")
            return flds.FieldProfile(omega0, omega0 * eps, 1.0 if self.a is None else self.a,
                                     1.0 if self.b is None else self.b, 1.0 if self.c is None else self.c,
                                     self.d or 0.0, self.phi or 0.0, label="raw")
        except flds.ProfileError as exc:
            raise ConfigError(f"profile: {exc}") from exc

    def _need(self, key):
        value = getattr(self, key)
        if value is None:
            raise ConfigError(f"profile: preset {self.preset!r} needs {key!r}")
        return value

    @property
    def epsilon_or_default(self) -> float:
        return self.epsilon if self.epsilon is not None else 0.1


@dataclass(frozen=True)
class GridCfg:
    x_min_lambda: float = 0.0
    x_max_lambda: float = 1.0
    n: int = 20001
    boundary: str = "dirichlet"


@dataclass(frozen=True)
class FeatureCfg:
    window_lambda: tuple | None = None
    rel_height: float = 1e-6


@dataclass(frozen=True)
class ValidityCfg:
    threshold: float = 0.2
    include_u1: bool = False


@dataclass(frozen=True)
class DipolarCfg:
    l_t: float = 0.0  # units of sqrt(eps) lambda
    width: str = slv.DEFAULT_WIDTH
    a_dd_lambda: float | None = None  # None: use the threshold a_dd_min


@dataclass(frozen=True)
class SolverCfg:
    n: int = 200
    order: int = 2
    rel_tol: float = 1e-2
    seed: int = 0
    distance: str = "rms"
    coupling_form: str = "symmetric"
    a_cap_lambda: float = 30.0

    def settings(self, width: str, seed: int | None = None) -> slv.SolverSettings:
        if self.order not in (2, 4):
            raise ConfigError("solver.order must be 2 or 4")
        if self.distance not in ("rms", "mean"):
            raise ConfigError("solver.distance must be 'rms' or 'mean'")
        if self.coupling_form not in ("symmetric", "cross"):
            raise ConfigError("solver.coupling_form must be 'symmetric' or 'cross'")
        if width not in slv.WIDTH_FACTORS:
            raise ConfigError(f"dipolar.width must be one of {sorted(slv.WIDTH_FACTORS)}")
        if self.n < 10:
            raise ConfigError("solver.n must be at least 10")
        return slv.SolverSettings(n=int(self.n), order=int(self.order), width=width, rel_tol=self.rel_tol,
                                  seed=int(self.seed if seed is None else seed),
                                  a_cap=self.a_cap_lambda * 2 * math.pi, distance=self.distance,
                                  coupling_form=self.coupling_form)


@dataclass(frozen=True)
class ScanCfg:
    epsilons: tuple = ()
    d: float = 0.0
    l_t: tuple = (0.0,)


@dataclass(frozen=True)
class DesignCfg:
    threshold: float = 0.2


@dataclass(frozen=True)
class OutputCfg:
    dir: str = "out"
    formats: tuple = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    species: SpeciesCfg = SpeciesCfg()
    lasers: LaserCfg = LaserCfg()
    profiles: tuple = ()
    grid: GridCfg = GridCfg()
    features: FeatureCfg = FeatureCfg()
    validity: ValidityCfg = ValidityCfg()
    dipolar: DipolarCfg = DipolarCfg()
    solver: SolverCfg = SolverCfg()
    scan: ScanCfg = ScanCfg()
    design: DesignCfg = DesignCfg()
    output: OutputCfg = OutputCfg()


_SECTIONS = {
    "species": SpeciesCfg, "lasers": LaserCfg, "grid": GridCfg, "features": FeatureCfg,
    "validity": ValidityCfg, "dipolar": DipolarCfg, "solver": SolverCfg, "scan": ScanCfg,
    "design": DesignCfg, "output": OutputCfg,
}
_INT_KEYS = {"n", "order", "seed"}
_STR_KEYS = {"preset", "boundary", "width", "distance", "coupling_form", "dir"}
_BOOL_KEYS = {"include_u1"}
_LIST_KEYS = {"window_lambda", "epsilons", "l_t@scan", "formats"}


def _section(cls, data, where: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping")
    names = {f.name for f in dc_fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(map(str, unknown))}")
    kwargs = {}
    for key, value in data.items():
        path = f"{where}.{key}"
        if value is None:
            kwargs[key] = None
        elif key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise ConfigError(f"{path}: expected true/false")
            kwargs[key] = value
        elif key in _STR_KEYS:
            if not isinstance(value, str):
                raise ConfigError(f"{path}: expected a string")
            kwargs[key] = value
        elif key in _LIST_KEYS or f"{key}@{where}" in _LIST_KEYS:
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{path}: expected a list")
            if key == "formats":
                bad = [v for v in value if v not in FORMATS]
                if bad:
                    raise ConfigError(f"{path}: unknown formats {bad}")
                kwargs[key] = tuple(value)
            else:
                kwargs[key] = tuple(_number(v, path) for v in value)
        elif key in _INT_KEYS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{path}: expected an integer")
            kwargs[key] = value
        else:
            kwargs[key] = _number(value, path)
    if cls is FeatureCfg and kwargs.get("window_lambda") is not None and len(kwargs["window_lambda"]) != 2:
        raise ConfigError(f"{where}.window_lambda: expected [lo, hi]")
    return cls(**kwargs)


def parse_config(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    allowed = set(_SECTIONS) | {"profile", "profiles"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(map(str, unknown))}")
    if "profile" in data and "profiles" in data:
        raise ConfigError("give either 'profile' or 'profiles', not both")
    kwargs = {name: _section(cls, data.get(name), name) for name, cls in _SECTIONS.items()}
    raw_profiles = data.get("profiles", [data["profile"]] if "profile" in data else [])
    if not isinstance(raw_profiles, list):
        raise ConfigError("profiles: expected a list")
    kwargs["profiles"] = tuple(_section(ProfileCfg, p, f"profiles[{i}]") for i, p in enumerate(raw_profiles))
    return RunConfig(**kwargs)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return parse_config(data)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

@dataclass
class Context:
    cfg: RunConfig
    out: Path
    formats: tuple
    threads: int | None
    seed: int | None
    species: AtomSpecies = field(init=False)
    omega0: float = field(init=False)
    delta: float = field(init=False)
    gamma: float = field(init=False)

    def __post_init__(self):
        self.species = self.cfg.species.build()
        sp = self.species
        self.omega0 = si_to_reduced(2 * math.pi * self.cfg.lasers.omega0_mhz * 1e6, "frequency", sp)
        self.delta = si_to_reduced(2 * math.pi * self.cfg.lasers.delta_mhz * 1e6, "frequency", sp)
        self.gamma = si_to_reduced(sp.gamma, "frequency", sp)

    def profiles(self):
        if not self.cfg.profiles:
            raise ConfigError("this command needs 'profile' or 'profiles'")
        return [p.build(self.omega0) for p in self.cfg.profiles]

    def grid(self):
        g = self.cfg.grid
        try:
            return make_grid(2 * math.pi * g.x_min_lambda, 2 * math.pi * g.x_max_lambda, g.n, g.boundary)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc

    def emit(self, name: str, *, csv: str | None = None, json: dict | None = None, svg_text: str | None = None):
        """Single writer for all outputs; returns the written paths."""
        written = []
        if csv is not None and "csv" in self.formats:
            written.append(write_text(self.out / f"{name}.csv", csv))
        if json is not None and "json" in self.formats:
            written.append(write_text(self.out / f"{name}.json", json_text(json)))
        if svg_text is not None and "svg" in self.formats:
            written.append(write_text(self.out / f"{name}.svg", svg_text))
        return written


def _stack(tables: list[dict]) -> dict:
    if len(tables) == 1:
        return tables[0]
    out = {"profile": np.concatenate([np.full(len(next(iter(t.values()))), i) for i, t in enumerate(tables)])}
    for key in tables[0]:
        out[key] = np.concatenate([np.asarray(t[key]) for t in tables])
    return out


def cmd_profile(ctx: Context) -> dict:
    grid = ctx.grid()
    x = grid.points
    lam = 2 * math.pi
    tables, series = [], []
    for i, p in enumerate(ctx.profiles()):
        t = {
            "x": x, "x_over_lambda": x / lam,
            "omega_c": flds.rabi_coupling(x, p), "omega_p": flds.rabi_probe(x, p),
            "f": flds.ratio(x, p), "alpha": flds.mixing_angle(x, p), "p_g1": population_g1(x, p),
        }
        tables.append(t)
        series.append((f"profile {i}", x / lam, t["p_g1"]))
    table = _stack(tables)
    meta = {"command": "profile", "profiles": [p.as_dict() for p in ctx.profiles()],
            "columns": list(table), "units": {"x": "1/k", "omega_c": "E_R/hbar", "omega_p": "E_R/hbar",
                                               "alpha": "rad"}}
    ctx.emit("profile", csv=table_csv(table), json=meta,
             svg_text=svg.line_plot(series, "P_g1", "x / lambda", "P_g1"))
    return meta


def _window(ctx: Context, p):
    w = ctx.cfg.features.window_lambda
    if w is not None:
        return (2 * math.pi * w[0], 2 * math.pi * w[1])
    return None


def cmd_potential(ctx: Context) -> dict:
    grid = ctx.grid()
    lam = 2 * math.pi
    tables, reports, series = [], [], []
    for i, p in enumerate(ctx.profiles()):
        pg = pot.potential_grid(grid, p, ctx.delta, ctx.gamma)
        t = pg.table()
        t = {"x_over_lambda": pg.x / lam, **t}
        tables.append(t)
        vr = pot.validity_check(pg, ctx.cfg.validity.threshold, ctx.cfg.validity.include_u1)
        loss = pot.loss_estimates(pg, gamma=ctx.gamma)
        fx = feat.find_extrema(pg, _window(ctx, p), ctx.cfg.features.rel_height, k=p.k)
        heights = [h for _, h in fx.peaks]
        asym = (max(heights) / min(heights) - 1) if len(heights) >= 2 and min(heights) > 0 else 0.0
        reports.append({
            "profile": p.as_dict(),
            "validity": {"ratio_u0": vr.ratio_u0, "ratio_u1": vr.ratio_u1, "x_worst": vr.x_worst,
                         "threshold": vr.threshold, "passed": vr.passed},
            "loss": {"max_p_b": loss.max_p_b, "max_p_b_exact": float(loss.p_b_exact.max()),
                     "max_p_b_ratio": float(loss.p_b_ratio.max()),
                     "max_gamma_d_over_2pi_hz": float(reduced_to_si(loss.gamma_d.max(), "frequency",
                                                                    ctx.species)) / (2 * math.pi)},
            "u0_max": float(pg.u0.max()), "u1_max": float(pg.u1.max()),
            "peaks": fx.peaks, "peak_asymmetry": asym, "asymmetric_peaks": bool(asym > 0.05),
        })
        series.append((f"U0 [{i}]", pg.x / lam, pg.u0))
        if i == 0:
            series.append(("U1 [0]", pg.x / lam, pg.u1))
    table = _stack(tables)
    meta = {"command": "potential", "delta": ctx.delta, "gamma": ctx.gamma, "omega0": ctx.omega0,
            "reports": reports, "units": "energies in E_R, lengths in 1/k, frequencies in E_R/hbar"}
    ctx.emit("potential", csv=table_csv(table), json=meta,
             svg_text=svg.line_plot(series, "non-adiabatic potentials", "x / lambda", "U / E_R",
                                    dashed=("U1 [0]",)))
    return meta


def _analytic_for(cfg: ProfileCfg, p):
    if cfg.preset == "double_barrier":
        return feat.analytic_double(cfg.epsilon, cfg.d or 0.0, p.k)
    if cfg.preset == "triple_barrier":
        return feat.analytic_triple(cfg.phi, p.k)
    return None


def cmd_features(ctx: Context) -> dict:
    grid = ctx.grid()
    out = []
    for cfg, p in zip(ctx.cfg.profiles, ctx.profiles()):
        pg = pot.potential_grid(grid, p)
        num = feat.find_extrema(pg, _window(ctx, p), ctx.cfg.features.rel_height, k=p.k)
        entry = {"profile": p.as_dict(), "numeric": num.as_dict()}
        ana = _analytic_for(cfg, p)
        if ana is not None:
            entry["analytic"] = ana.as_dict()
            entry["comparison"] = feat.compare(num, ana)
        out.append(entry)
    meta = {"command": "features", "results": out}
    ctx.emit("features", json=meta)
    return meta


def _bound_profile(ctx: Context):
    profiles = ctx.profiles()
    cfg = ctx.cfg.profiles[0]
    if cfg.preset != "double_barrier" or len(profiles) != 1:
        raise ConfigError("bound-state commands need exactly one double_barrier profile")
    return cfg, profiles[0]


def cmd_boundstate(ctx: Context) -> dict:
    cfg, p = _bound_profile(ctx)
    eps = cfg.epsilon
    lam = 2 * math.pi
    settings = ctx.cfg.solver.settings(ctx.cfg.dipolar.width, ctx.seed)
    l_t = ctx.cfg.dipolar.l_t * math.sqrt(eps) * lam
    problem = slv.BoundProblem(p, l_t, settings)
    if ctx.cfg.dipolar.a_dd_lambda is None:
        th = slv.add_min_bisect(problem)
        a_dd, gs = th.a_dd_min, th.state
        bracket = {"a_lo": th.a_lo, "a_hi": th.a_hi, "e_lo": th.e_lo, "e_hi": th.e_hi, "solves": th.solves}
    else:
        a_dd = ctx.cfg.dipolar.a_dd_lambda * lam
        gs = problem.solve(a_dd)
        bracket = None
    res = slv.bound_state_result(problem, gs, a_dd, ctx.gamma)
    geo = slv.geometry_metrics(gs.psi, problem)
    x = problem.grid.interior
    dens = np.abs(gs.psi) ** 2
    meta = {
        "command": "boundstate", "profile": p.as_dict(), "l_t": l_t, "width": settings.width,
        "a_dd": a_dd, "a_dd_over_lambda": a_dd / lam, "a_dd_over_sqrt_eps_lambda": a_dd / (math.sqrt(eps) * lam),
        "a_dd_nm": reduced_to_si(a_dd, "length", ctx.species) * 1e9,
        "status": "bound" if res.energy_0 < 0 else "no bound state",
        "observables": res.summary(), "tau_s": reduced_to_si(res.tau, "time", ctx.species),
        "geometry": geo, "bracket": bracket, "grid_n": settings.n, "seed": settings.seed,
    }
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    table = {"x1": x1.ravel(), "x2": x2.ravel(), "density": dens.ravel()}
    ctx.emit("boundstate", json=meta)
    ctx.emit("density", csv=table_csv(table),
             svg_text=svg.heatmap(x / lam, x / lam, dens, "|psi(x1, x2)|^2", "x1 / lambda", "x2 / lambda"))
    return meta


def cmd_scan(ctx: Context) -> dict:
    sc = ctx.cfg.scan
    settings = ctx.cfg.solver.settings(ctx.cfg.dipolar.width, ctx.seed)
    res = slv.scan(sc.epsilons, sc.d, sc.l_t, ctx.omega0, ctx.gamma, settings, ctx.threads)
    for r in res.rows:
        r["tau_s"] = reduced_to_si(r["tau"], "time", ctx.species) if r["status"] == "ok" else math.nan
        r["tau_cross_s"] = reduced_to_si(r["tau_cross"], "time", ctx.species) if r["status"] == "ok" else math.nan
    cols = list(slv.SCAN_COLUMNS) + ["tau_s", "tau_cross_s"]
    table = {c: [r[c] for r in res.rows] for c in cols}
    meta = {"command": "scan", "epsilons": list(sc.epsilons), "d": sc.d, "l_t": list(sc.l_t),
            "width": settings.width, "distance": settings.distance, "coupling_form": settings.coupling_form,
            "grid_n": settings.n, "order": settings.order, "rel_tol": settings.rel_tol, "fits": res.fits,
            "failures": [r["status"] for r in res.rows if r["status"] != "ok"],
            "reference_slopes": {"0": 1.2, "0.1": 1.5, "0.2": 3.0}}
    series = []
    for lt in sorted(set(sc.l_t)):
        sub = [r for r in res.rows if r["l_t_over_sqrt_eps_lambda"] == lt]
        series.append((f"l_T={lt:g}", [r["x_bar"] for r in sub], [r["a_dd_min"] for r in sub]))
    ctx.emit("scan", csv=table_csv(table), json=meta,
             svg_text=svg.line_plot(series, "a_dd_min vs x_bar", "x_bar (1/k)", "a_dd_min (1/k)", markers=True))
    return meta


def experiment_report(species: AtomSpecies, omega0_rad_s: float, threshold: float = 0.2) -> dict:
    """Design numbers for the double and triple barriers plus the two loss conventions."""
    dbl = pot.design_minimum_spacing(species, omega0_rad_s, threshold, "double")
    tri = pot.design_minimum_spacing(species, omega0_rad_s, threshold, "triple")
    w0 = si_to_reduced(omega0_rad_s, "frequency", species)
    gamma = si_to_reduced(species.gamma, "frequency", species)
    p = flds.double_barrier(dbl["u"], 0.0, 0.0, omega0=w0)
    grid = make_grid(math.pi - 0.6, math.pi + 0.6, 24001, "dirichlet")
    pg = pot.potential_grid(grid, p)
    loss = pot.loss_estimates(pg, gamma=gamma)
    p_b_bound = loss.max_p_b
    to_hz = lambda g: reduced_to_si(g, "frequency", species) / (2 * math.pi)
    return {
        "species": species.name, "wavelength_nm": species.wavelength * 1e9,
        "omega0_over_2pi_mhz": omega0_rad_s / (2 * math.pi) / 1e6, "threshold": threshold,
        "recoil_over_h_hz": species.recoil_energy / H_PLANCK,
        "double": {**dbl, "spacing_peak_to_peak_nm": dbl["spacing_peak_to_peak_m"] * 1e9,
                   "spacing_half_max_width_nm": dbl["spacing_half_max_width_m"] * 1e9,
                   "e_min_over_h_khz": dbl["e_min_over_h_Hz"] / 1e3},
        "triple": {**tri, "spacing_nm": tri["spacing_m"] * 1e9},
        "loss": {
            "gamma_over_2pi_khz": species.gamma / (2 * math.pi) / 1e3,
            "p_b_ratio": dbl["p_b_ratio"],
            "gamma_d_ratio_over_2pi_khz": to_hz(gamma * dbl["p_b_ratio"]) / 1e3,
            "p_b_bound": p_b_bound,
            "gamma_d_bound_over_2pi_khz": to_hz(gamma * p_b_bound) / 1e3,
        },
    }


def cmd_experiment(ctx: Context) -> dict:
    rep = experiment_report(ctx.species, 2 * math.pi * ctx.cfg.lasers.omega0_mhz * 1e6, ctx.cfg.design.threshold)
    flat = []

    def walk(prefix, obj):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, dict):
                walk(f"{prefix}{k}.", v)
            else:
                flat.append((f"{prefix}{k}", v))

    walk("", rep)
    ctx.emit("experiment", csv=table_csv({"quantity": [k for k, _ in flat], "value": [v for _, v in flat]}),
             json={"command": "experiment", **rep})
    return rep


COMMANDS = {
    "profile": cmd_profile, "potential": cmd_potential, "features": cmd_features,
    "boundstate": cmd_boundstate, "scan": cmd_scan, "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="darkbarrier", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="YAML run configuration")
    ap.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    ap.add_argument("--format", default=None, help="comma-separated subset of csv,json,svg")
    ap.add_argument("--threads", type=int, default=None, help="worker processes for scans")
    ap.add_argument("--seed", type=int, default=None, help="eigensolver start-vector seed")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        formats = cfg.output.formats
        if args.format is not None:
            formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
            bad = [f for f in formats if f not in FORMATS]
            if bad:
                raise ConfigError(f"--format: unknown {bad}")
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        out = Path(args.out if args.out is not None else cfg.output.dir)
        ctx = Context(cfg, out, formats, args.threads, args.seed)
        COMMANDS[args.command](ctx)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (slv.SolverError, flds.ProfileError, feat.FeatureError, pot.DesignError,
            ArithmeticError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
