"""Non-adiabatic scalar potentials, Born-Oppenheimer validity and dark-state loss.

In reduced units hbar^2/2m = 1, so

    U0 = alpha'^2,   U1 = (Omega'/Omega)^2 / 4,
    U_a = N_a^2 U0 + 4 C^2 U1,   U_b = N_+ N_- alpha'^2,
    U_0+- = +- N_-+ C alpha' Omega'/Omega.

Loss and validity numbers use the upper bound |U_0+-| <= sqrt(U0 U1)/2, which
does not depend on the detuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fields
from .adiabatic import bright_frequencies, mixing_factors, population_g1
from .core import AtomSpecies, Grid1D, si_to_reduced, reduced_to_si, H_PLANCK


def u0(x, p):
    return np.square(fields.alpha_prime(x, p))


def u1(x, p):
    return 0.25 * np.square(fields.log_derivative(x, p))


def bright_potentials(x, p, delta: float = 0.0):
    omega = fields.omega_norm(x, p)
    n_plus, n_minus, c = mixing_factors(omega, delta)
    a0, a1 = u0(x, p), u1(x, p)
    return n_plus**2 * a0 + 4 * c**2 * a1, n_minus**2 * a0 + 4 * c**2 * a1


def off_diagonal(x, p, delta: float = 0.0):
    """(U_b, U_0+, U_0-, V_+D, V_-D); the rates are |U_0+-| / hbar."""
    omega = fields.omega_norm(x, p)
    n_plus, n_minus, c = mixing_factors(omega, delta)
    ap = fields.alpha_prime(x, p)
    lg = fields.log_derivative(x, p)
    u_b = n_plus * n_minus * ap * ap
    u0p = n_minus * c * ap * lg
    u0m = -n_plus * c * ap * lg
    return u_b, u0p, u0m, np.abs(u0p), np.abs(u0m)


@dataclass(frozen=True)
class PotentialGrid:
    grid: Grid1D
    x: np.ndarray
    u0: np.ndarray
    u1: np.ndarray
    u_plus: np.ndarray
    u_minus: np.ndarray
    u_b: np.ndarray
    u0p: np.ndarray
    u0m: np.ndarray
    v_plus_d: np.ndarray
    v_minus_d: np.ndarray
    p_g1: np.ndarray
    omega: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    validity: np.ndarray
    p_b: np.ndarray
    gamma_d: np.ndarray
    delta: float = 0.0
    gamma: float = 0.0
    meta: dict = field(default_factory=dict)

    COLUMNS = ("x", "u0", "u1", "u_plus", "u_minus", "u_b", "u0p", "u0m", "v_plus_d",
               "v_minus_d", "p_g1", "omega", "omega_plus", "omega_minus", "validity",
               "p_b", "gamma_d")

    def table(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def potential_grid(grid: Grid1D, p, delta: float = 0.0, gamma: float = 0.0) -> PotentialGrid:
    """Sample every scalar field on ``grid.points``; ``gamma`` in E_R/hbar for gamma_d."""
    x = grid.points
    a0, a1 = u0(x, p), u1(x, p)
    u_plus, u_minus = bright_potentials(x, p, delta)
    u_b, u0p, u0m, vp, vm = off_diagonal(x, p, delta)
    omega = fields.omega_norm(x, p)
    o_plus, o_minus = bright_frequencies(omega, delta)
    gap = np.minimum(np.abs(o_plus), np.abs(o_minus))
    validity = np.maximum(a0, a1) / gap
    p_b = a0 * a1 / (4 * omega * omega)
    return PotentialGrid(
        grid=grid, x=x, u0=a0, u1=a1, u_plus=u_plus, u_minus=u_minus, u_b=u_b,
        u0p=u0p, u0m=u0m, v_plus_d=vp, v_minus_d=vm, p_g1=population_g1(x, p),
        omega=omega, omega_plus=o_plus, omega_minus=o_minus, validity=validity,
        p_b=p_b, gamma_d=gamma * p_b, delta=float(delta), gamma=float(gamma),
    )


@dataclass(frozen=True)
class ValidityReport:
    ratio_u0: float
    ratio_u1: float
    x_worst: float
    threshold: float
    passed: bool
    ratio_global: float = math.nan  # max U0 / min |Omega_+-|, the design-level reading
    mode: str = "pointwise"

    @property
    def ratio(self) -> float:
        return self.ratio_u0


def validity_check(pg: PotentialGrid, threshold: float = 0.2, include_u1: bool = False,
                   mode: str = "pointwise") -> ValidityReport:
    """Max over x of U_i / (hbar |Omega_+-|); ``passed`` compares U0 (and U1 if asked) to ``threshold``.

    With |Delta| <~ Omega the U0 condition is the binding one, which is why
    U1 is opt-in.  ``mode="global"`` instead tests max U / min |Omega_+-|,
    the cruder balance used to size the fields, which is never smaller.
    """
    if mode not in ("pointwise", "global"):
        raise ValueError(f"unknown validity mode {mode!r}")
    gap = np.minimum(np.abs(pg.omega_plus), np.abs(pg.omega_minus))
    r0 = pg.u0 / gap
    r1 = pg.u1 / gap
    top = np.maximum(pg.u0, pg.u1) if include_u1 else pg.u0
    ratio_global = float(top.max() / gap.min())
    if mode == "global":
        worst = ratio_global
        i = int(np.argmax(top))
    else:
        worst = float(max(r0.max(), r1.max()) if include_u1 else r0.max())
        i = int(np.argmax(np.maximum(r0, r1) if include_u1 else r0))
    # boundary cases count as passing up to rounding
    passed = worst <= threshold * (1 + 1e-12)
    return ValidityReport(float(r0.max()), float(r1.max()), float(pg.x[i]), float(threshold), bool(passed),
                          ratio_global, mode)


@dataclass(frozen=True)
class LossEstimate:
    p_b: np.ndarray
    gamma_d: np.ndarray
    p_b_exact: np.ndarray
    p_b_ratio: np.ndarray

    @property
    def max_p_b(self) -> float:
        return float(self.p_b.max())


def loss_estimates(pg: PotentialGrid, species: AtomSpecies | None = None, gamma: float | None = None) -> LossEstimate:
    """P_B = V^2/Omega^2 with the bound V = sqrt(U0 U1)/2, and gamma_d = gamma P_B.

    ``gamma`` (reduced) overrides the species linewidth.  Also returned: P_B
    from the exact detuning-dependent V_+-D and the cruder (U0/Omega)^2.
    """
    if gamma is None:
        if species is None:
            raise ValueError("need a species or an explicit gamma")
        gamma = si_to_reduced(species.gamma, "frequency", species)
    omega2 = pg.omega**2
    p_b = pg.u0 * pg.u1 / (4 * omega2)
    exact = np.maximum(pg.v_plus_d, pg.v_minus_d) ** 2 / omega2
    ratio = (pg.u0 / pg.omega) ** 2
    return LossEstimate(p_b=p_b, gamma_d=gamma * p_b, p_b_exact=exact, p_b_ratio=ratio)


# ---------------------------------------------------------------------------
# experimental design
# ---------------------------------------------------------------------------

class DesignError(ValueError):
    pass


SQRT27 = math.sqrt(27.0)


def design_minimum_spacing(species: AtomSpecies, omega0: float, threshold: float = 0.2,
                           kind: str = "double") -> dict:
    """Smallest barrier spacing allowed by peak U0 <= threshold * hbar * Omega_min.

    ``omega0`` is the Rabi scale in rad/s.  Double barrier: peak U0 =
    sqrt(27)/(8u) E_R with u = eps(1-d) and Omega_min = Omega0 u.  Triple
    barrier: peak 16/phi^2 E_R with Omega_min = Omega0 phi^2/2.
    """
    w0 = si_to_reduced(omega0, "frequency", species)
    lam = species.wavelength
    if kind == "double":
        u = math.sqrt(SQRT27 / (8 * threshold * w0))
        if not u < 1:
            raise DesignError(f"fields too weak: eps(1-d) = {u:.3g} >= 1")
        peak_to_peak = 2 * (4 / 3) ** 0.25 * math.sqrt(u)
        e_min = 1.0 / u
        peak = SQRT27 / (8 * u)
        p_ratio = (peak / (w0 * u)) ** 2
        return {
            "kind": "double",
            "u": u,
            "peak_u0_ER": peak,
            "omega_min_reduced": w0 * u,
            "spacing_peak_to_peak_m": reduced_to_si(peak_to_peak, "length", species),
            "spacing_half_max_width_m": 0.2 * math.sqrt(u) * lam,
            "e_min_J": reduced_to_si(e_min, "energy", species),
            "e_min_over_h_Hz": reduced_to_si(e_min, "energy", species) / H_PLANCK,
            "p_b_ratio": p_ratio,
            "note": "peak-to-peak and half-maximum well width bracket the quoted 13 nm; neither equals it",
        }
    if kind == "triple":
        phi = (32 / (threshold * w0)) ** 0.25
        if not phi < math.pi:
            raise DesignError(f"fields too weak: phi = {phi:.3g} >= pi")
        peak = 16 / phi**2
        return {
            "kind": "triple",
            "phi": phi,
            "peak_u0_ER": peak,
            "omega_min_reduced": w0 * phi**2 / 2,
            "spacing_m": reduced_to_si(phi, "length", species),
            "p_b_ratio": (peak / (w0 * phi**2 / 2)) ** 2,
        }
    raise DesignError(f"unknown barrier kind {kind!r}")
