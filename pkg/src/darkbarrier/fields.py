"""Spatial Rabi-frequency profiles and the mixing angle they define.

A cosine profile has

    Omega_c(x) = omega0_c * (a + b cos kx)
    Omega_p(x) = omega0_p * (c + d cos(kx + phi))

and the ratio f = Omega_c / Omega_p = tan(alpha).  Nothing is tabulated: every
quantity, including alpha' and Omega'/Omega, is evaluated from the
coefficients, so U0 = alpha'^2 carries no interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ProfileError(ValueError):
    pass


_SAMPLES_PER_PERIOD = 10_000


@dataclass(frozen=True)
class FieldProfile:
    omega0_c: float
    omega0_p: float
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    d: float = 0.0
    phi: float = 0.0
    k: float = 1.0
    label: str = "custom"

    def __post_init__(self):
        if not (self.omega0_c > 0 and self.omega0_p > 0 and self.k > 0):
            raise ProfileError("Rabi scales and k must be positive")
        x = np.arange(_SAMPLES_PER_PERIOD) * (2 * math.pi / self.k / _SAMPLES_PER_PERIOD)
        omega = np.hypot(self.coupling(x), self.probe(x))
        scale = max(abs(self.omega0_c) * (abs(self.a) + abs(self.b)),
                    abs(self.omega0_p) * (abs(self.c) + abs(self.d)))
        if omega.min() <= 1e-12 * scale:
            raise ProfileError(
                f"total Rabi frequency vanishes near x = {x[omega.argmin()]:.6g}; "
                "the dark state is undefined there"
            )

    @property
    def epsilon(self) -> float:
        return self.omega0_p / self.omega0_c

    @property
    def period(self) -> float:
        return 2 * math.pi / self.k

    def scaled(self, factor: float) -> "FieldProfile":
        return FieldProfile(self.omega0_c * factor, self.omega0_p * factor, self.a, self.b,
                            self.c, self.d, self.phi, self.k, self.label)

    def coupling(self, x):
        return self.omega0_c * (self.a + self.b * np.cos(self.k * np.asarray(x)))

    def probe(self, x):
        return self.omega0_p * (self.c + self.d * np.cos(self.k * np.asarray(x) + self.phi))

    def coupling_prime(self, x):
        return -self.omega0_c * self.b * self.k * np.sin(self.k * np.asarray(x))

    def probe_prime(self, x):
        return -self.omega0_p * self.d * self.k * np.sin(self.k * np.asarray(x) + self.phi)

    def as_dict(self) -> dict:
        return {
            "label": self.label, "omega0_c": self.omega0_c, "omega0_p": self.omega0_p,
            "a": self.a, "b": self.b, "c": self.c, "d": self.d, "phi": self.phi, "k": self.k,
        }


@dataclass(frozen=True)
class PolynomialProfile:
    """f(x) = (k(x - x0))^n / epsilon, meant for the window |k(x - x0)| <= 1.

    Omega_c = omega0 (k(x - x0))^n and Omega_p = omega0 * epsilon.  For n = 1
    this is the single-barrier case with U0 = E_R / eps^2 / (1 + (kx/eps)^2)^2;
    n > 1 gives a double barrier around x0.
    """

    epsilon: float
    n: int = 1
    omega0: float = 1.0
    x0: float = 0.0
    k: float = 1.0
    label: str = "linear_approx"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ProfileError("epsilon must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise ProfileError("polynomial order n must be an integer >= 1")

    @property
    def omega0_c(self) -> float:
        return self.omega0

    @property
    def omega0_p(self) -> float:
        return self.omega0 * self.epsilon

    def scaled(self, factor: float) -> "PolynomialProfile":
        return PolynomialProfile(self.epsilon, self.n, self.omega0 * factor, self.x0, self.k, self.label)

    def coupling(self, x):
        return self.omega0 * (self.k * (np.asarray(x) - self.x0)) ** self.n

    def probe(self, x):
        return np.full(np.shape(x), self.omega0 * self.epsilon) if np.ndim(x) else self.omega0 * self.epsilon

    def coupling_prime(self, x):
        u = self.k * (np.asarray(x) - self.x0)
        return self.omega0 * self.n * self.k * u ** (self.n - 1)

    def probe_prime(self, x):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0

    def as_dict(self) -> dict:
        return {"label": self.label, "epsilon": self.epsilon, "n": self.n, "omega0": self.omega0,
                "x0": self.x0, "k": self.k}


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def double_barrier(epsilon: float, d: float = 0.0, phi: float = 0.0, omega0: float = 1.0,
                   k: float = 1.0) -> FieldProfile:
    """f = (1 + cos kx) / (epsilon (1 + d cos(kx + phi))), well centred at pi/k."""
    if not epsilon > 0:
        raise ProfileError("double barrier needs epsilon > 0")
    if not 0 <= d < 1:
        raise ProfileError("double barrier needs 0 <= d < 1")
    return FieldProfile(omega0, omega0 * epsilon, 1.0, 1.0, 1.0, d, phi, k, label="double_barrier")


def triple_barrier(phi: float, omega0: float = 1.0, k: float = 1.0) -> FieldProfile:
    """f = (1 + cos kx) / (1 + cos(kx + phi)); central peak at kx = pi - phi/2."""
    if not 0 < phi < math.pi:
        raise ProfileError("triple barrier needs 0 < phi < pi")
    return FieldProfile(omega0, omega0, 1.0, 1.0, 1.0, 1.0, phi, k, label="triple_barrier")


def linear_approx(epsilon: float, n: int = 1, omega0: float = 1.0, x0: float = 0.0,
                  k: float = 1.0) -> PolynomialProfile:
    return PolynomialProfile(epsilon, n, omega0, x0, k)


# ---------------------------------------------------------------------------
# pointwise quantities
# ---------------------------------------------------------------------------

def rabi_coupling(x, p):
    return p.coupling(x)


def rabi_probe(x, p):
    return p.probe(x)


def ratio(x, p):
    """f = Omega_c / Omega_p.

    A probe zero with nonzero coupling gives +-inf.  A common zero is resolved
    with one L'Hopital step, Omega_c' / Omega_p'; if that is 0/0 as well the
    ratio is undefined and ProfileError is raised.
    """
    x = np.asarray(x, dtype=float)
    num = np.asarray(p.coupling(x), dtype=float)
    den = np.asarray(p.probe(x), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / den
    both = (num == 0) & (den == 0)
    if np.any(both):
        dnum = np.broadcast_to(p.coupling_prime(x), x.shape)[both]
        dden = np.broadcast_to(p.probe_prime(x), x.shape)[both]
        if np.any(dden == 0):
            raise ProfileError("ratio undefined: coupling, probe and probe slope all vanish")
        out = np.array(out, copy=True)
        out[both] = dnum / dden
    return out[()] if out.ndim == 0 else out


def mixing_angle(x, p):
    """alpha = arctan f, with alpha = pi/2 at poles of f.

    Scalars land in (-pi/2, pi/2]; arrays are unwrapped with period pi so the
    angle is continuous along the sample order.
    """
    c = np.asarray(p.coupling(x), dtype=float)
    s = np.asarray(p.probe(x), dtype=float)
    alpha = np.arctan2(c, s)
    # arctan f is defined modulo pi
    alpha = np.where(alpha > math.pi / 2, alpha - math.pi, alpha)
    alpha = np.where(alpha <= -math.pi / 2, alpha + math.pi, alpha)
    if alpha.ndim:
        return np.unwrap(alpha, period=math.pi)
    return float(alpha)


def omega_norm(x, p):
    omega = np.hypot(p.coupling(x), p.probe(x))
    if np.any(omega == 0):
        raise ProfileError("total Rabi frequency is zero")
    return omega


def alpha_prime(x, p):
    """d alpha / dx = (Omega_c' Omega_p - Omega_c Omega_p') / Omega^2.

    Equal to f' / (1 + f^2) but regular at poles of f, so no special casing is
    needed as long as Omega > 0.
    """
    c, s = p.coupling(x), p.probe(x)
    dc, ds = p.coupling_prime(x), p.probe_prime(x)
    omega2 = c * c + s * s
    if np.any(omega2 == 0):
        raise ProfileError("total Rabi frequency is zero")
    return (dc * s - c * ds) / omega2


def log_derivative(x, p):
    """Omega'/Omega = (Omega_c Omega_c' + Omega_p Omega_p') / Omega^2."""
    c, s = p.coupling(x), p.probe(x)
    dc, ds = p.coupling_prime(x), p.probe_prime(x)
    omega2 = c * c + s * s
    if np.any(omega2 == 0):
        raise ProfileError("total Rabi frequency is zero")
    return (c * dc + s * ds) / omega2


def double_barrier_local_alpha_prime(x, epsilon: float, d: float = 0.0, k: float = 1.0):
    """Small-offset model of alpha' around the well centre pi/k (phi = 0)."""
    u = epsilon * (1 - d)
    dx = np.asarray(x) - math.pi / k
    return k / u * (k * dx) / (1 + (k * k * dx * dx / (2 * u)) ** 2)


def triple_barrier_alpha_prime(x, phi: float, k: float = 1.0):
    kx = k * np.asarray(x)
    num = np.sin(kx + phi) - np.sin(kx) + math.sin(phi)
    den = (1 + np.cos(kx)) ** 2 + (1 + np.cos(kx + phi)) ** 2
    return k * num / den
