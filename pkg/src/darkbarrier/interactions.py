"""Position-dependent magnetic moments and the transverse-averaged dipolar interaction.

Moments point along z, perpendicular to the x axis the atoms move on.  The
transverse separation rho = (y12, z12) is Gaussian with per-axis standard
deviation sigma = width_factor * l_T.  Averaging over the polar angle of rho
reduces the 3D kernel (r^2 - 3 z^2)/r^5 to

    F(x) = int_0^inf (x^2 - rho^2/2) / (x^2 + rho^2)^(5/2) (rho/sigma^2) exp(-rho^2/2sigma^2) drho

so V_eff = mu0 mu1 mu2 / (4 pi) * F.  For x != 0 the integral of the same
kernel against the flat weight rho/sigma^2 vanishes, so subtracting it leaves
F unchanged while making the integrand finite at x = 0; the value at x = 0 is
the regular part sqrt(pi/2) / (2 sigma^3), with the contact (delta) piece
dropped.  In reduced units mu0 mu_m^2 / (4 pi) = 3 hbar^2 a_dd / m = 6 a_dd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import dblquad, quad
from scipy.interpolate import CubicSpline

from .adiabatic import population_g1
from .core import HBAR, KINETIC, MU0, AtomSpecies

WIDTH_FACTORS = {
    "single": 1 / math.sqrt(2),  # literal P(y, z) of one atom taken as the relative spread
    "relative": 1.0,  # convolution of two single-atom distributions
    "wide": math.sqrt(2),
}
DEFAULT_WIDTH = "single"


class InteractionError(ValueError):
    pass


def magnetic_moment(x, p, mu_max: float = 1.0):
    """mu(x) = mu_max (2 P_g1(x) - 1): +mu_max where f = 0, 0 on domain walls f = 1, -mu_max at poles."""
    return mu_max * (2 * population_g1(x, p) - 1)


def dipolar_length(mu: float, species: AtomSpecies) -> float:
    """a_dd = mu0 mu^2 m / (12 pi hbar^2), SI in and out."""
    return MU0 * mu * mu * species.mass / (12 * math.pi * HBAR**2)


def moment_for(a_dd: float, species: AtomSpecies) -> float:
    if a_dd < 0:
        raise InteractionError("dipolar length must be non-negative")
    return math.sqrt(12 * math.pi * HBAR**2 * a_dd / (MU0 * species.mass))


def dipolar_strength(a_dd: float) -> float:
    """mu0 mu_m^2 / (4 pi) in reduced units for a reduced dipolar length."""
    return 6 * KINETIC * a_dd


def v3d(x12, y12, z12, mu1, mu2, cutoff: float = 0.0, mu0: float = MU0):
    """mu0 mu1 mu2 (r^2 - 3 z^2) / (4 pi r^5) for z-polarized dipoles.

    Separations shorter than ``cutoff`` are pulled out to ``cutoff`` along the
    same direction.
    """
    x12, y12, z12 = (np.asarray(v, dtype=float) for v in (x12, y12, z12))
    r = np.sqrt(x12**2 + y12**2 + z12**2)
    if np.any(r == 0) and cutoff <= 0:
        raise InteractionError("coincident dipoles need a positive cutoff")
    cos2 = np.divide(z12**2, r**2, out=np.zeros_like(r), where=r > 0)
    r = np.maximum(r, cutoff)
    out = mu0 * mu1 * mu2 * (1 - 3 * cos2) / (4 * math.pi * r**3)
    return out[()] if out.ndim == 0 else out


def transverse_kernel(x: float, sigma: float, cutoff: float = 0.0) -> float:
    """Unit-strength averaged kernel F(x) (see module docstring)."""
    x = abs(float(x))
    if sigma <= 0:
        if cutoff <= 0 and x == 0:
            raise InteractionError("bare 1/|x|^3 kernel needs a positive cutoff")
        return 1.0 / max(x, cutoff) ** 3
    if x == 0:
        return math.sqrt(math.pi / 2) / (2 * sigma**3)
    s2 = sigma * sigma
    # x >= sigma: plain Gaussian weight (the flat part would cancel at ~sigma/x precision loss);
    # x < sigma: Gaussian minus flat weight, which tames the 1/x^3 peak near rho ~ x
    weight = math.exp if x >= sigma else math.expm1

    def integrand(rho):
        return ((x * x - 0.5 * rho * rho) / (x * x + rho * rho) ** 2.5
                * (rho / s2) * weight(-rho * rho / (2 * s2)))

    if x >= sigma:
        # the Gaussian lives on a few sigma; beyond 40 sigma it is below exp(-800)
        cuts = sorted({0.0, *(c * sigma for c in (1, 2, 4, 8, 16, 40)), *([x] if x < 40 * sigma else [])})
        tail = None
    else:
        cuts = [0.0, x, sigma, 11 * sigma]
        tail = math.inf
    floor = 1e-15 / max(x, sigma) ** 3
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += quad(integrand, lo, hi, epsabs=floor, epsrel=1e-11, limit=200)[0]
    if tail is not None:
        total += quad(integrand, cuts[-1], tail, epsabs=floor, epsrel=1e-11, limit=200)[0]
    return total


def transverse_kernel_2d(x: float, sigma: float) -> float:
    """Direct 2D quadrature of the 3D kernel over the Gaussian (y, z) weight; test oracle."""
    if sigma <= 0 or x == 0:
        raise InteractionError("2D oracle needs sigma > 0 and x != 0")
    s2 = sigma * sigma
    L = 9 * sigma

    def f(z, y):
        r2 = x * x + y * y + z * z
        return (r2 - 3 * z * z) / r2**2.5 * math.exp(-(y * y + z * z) / (2 * s2)) / (2 * math.pi * s2)

    val, _ = dblquad(f, -L, L, -L, L, epsabs=1e-13 / abs(x) ** 3, epsrel=1e-10)
    return val


@dataclass(frozen=True)
class DipolarModel:
    """Tabulated unit-strength kernel F plus the dipolar length that scales it.

    Lengths are reduced (1/k).  ``sigma`` = width_factor * l_T; with l_T = 0
    the bare kernel is clamped at ``cutoff``.
    """

    l_t: float
    a_dd: float = 0.0
    cutoff: float = 0.0
    width: str = DEFAULT_WIDTH
    x_max: float = 2 * math.pi
    nodes: np.ndarray = field(default=None, repr=False, compare=False)
    values: np.ndarray = field(default=None, repr=False, compare=False)
    spline: CubicSpline = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.l_t < 0:
            raise InteractionError("l_T must be non-negative")
        if self.l_t == 0 and not self.cutoff > 0:
            raise InteractionError("l_T = 0 needs a positive cutoff")
        if self.width not in WIDTH_FACTORS:
            raise InteractionError(f"unknown transverse width convention {self.width!r}")

    @property
    def sigma(self) -> float:
        return WIDTH_FACTORS[self.width] * self.l_t

    @property
    def strength(self) -> float:
        return dipolar_strength(self.a_dd)

    def with_add(self, a_dd: float) -> "DipolarModel":
        return replace(self, a_dd=float(a_dd))

    def kernel(self, x12):
        """Unit-strength F(|x12|) from the table (cubic between nodes)."""
        x = np.abs(np.asarray(x12, dtype=float))
        if np.any(x > self.nodes[-1] * (1 + 1e-12)):
            raise InteractionError(
                f"|x12| = {x.max():.6g} outside the tabulated range [0, {self.nodes[-1]:.6g}]"
            )
        out = self.spline(np.minimum(x, self.nodes[-1]))
        return out[()] if np.ndim(out) == 0 else out

    def table(self) -> dict:
        return {"x12": self.nodes, "kernel": self.values, "v_eff": self.strength * self.values}


def build_model(l_t: float, a_dd: float = 0.0, cutoff: float = 0.0, width: str = DEFAULT_WIDTH,
                x_max: float = 2 * math.pi, spacing: float | None = None) -> DipolarModel:
    """Tabulate F on [0, x_max]; pass the solver grid spacing as ``spacing`` so
    every grid separation is a node and interpolation is exact there."""
    model = DipolarModel(l_t=l_t, a_dd=a_dd, cutoff=cutoff, width=width, x_max=x_max)
    if spacing is None:
        spacing = x_max / 2000
    n = int(math.ceil(x_max / spacing - 1e-9)) + 1
    nodes = spacing * np.arange(n)
    sigma = model.sigma
    values = np.array([transverse_kernel(x, sigma, cutoff) for x in nodes])
    if sigma == 0:
        # the clamp makes F flat below the cutoff; keep the spline from overshooting there
        spline = CubicSpline(nodes, values, bc_type="clamped") if len(nodes) > 3 else CubicSpline(nodes, values)
    else:
        # F is even and smooth through x = 0
        spline = CubicSpline(nodes, values, bc_type=((1, 0.0), "not-a-knot"))
    return replace(model, nodes=nodes, values=values, spline=spline)


def effective_1d(x12, model: DipolarModel, mu1=1.0, mu2=1.0):
    """Transverse-averaged interaction energy (E_R); moments in units of mu_max."""
    return model.strength * np.asarray(mu1) * np.asarray(mu2) * model.kernel(x12)
