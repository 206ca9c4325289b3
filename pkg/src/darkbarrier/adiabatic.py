"""Internal Lambda-system eigenstates at a fixed position.

Basis order is (g1, g2, e).  With hbar = 1 the internal Hamiltonian is

    H_in = [[0, 0, Oc/2], [0, 0, Op/2], [Oc/2, Op/2, -Delta]]

and the eigenvectors are built from closed forms; :func:`numeric_eigensystem`
exists as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ProfileError, ratio


@dataclass(frozen=True)
class InternalEigensystem:
    x: float
    dark: np.ndarray
    bright_plus: np.ndarray
    bright_minus: np.ndarray
    energy_plus: float
    energy_minus: float
    n_plus: float
    n_minus: float
    c_factor: float
    delta: float
    omega: float
    energy_dark: float = 0.0

    @property
    def omega_plus(self) -> float:
        return 2 * self.energy_plus

    @property
    def omega_minus(self) -> float:
        return 2 * self.energy_minus


def internal_hamiltonian(omega_c: float, omega_p: float, delta: float = 0.0) -> np.ndarray:
    return np.array([
        [0.0, 0.0, omega_c / 2],
        [0.0, 0.0, omega_p / 2],
        [omega_c / 2, omega_p / 2, -delta],
    ])


def bright_frequencies(omega, delta):
    """Omega_+- = -Delta +- sqrt(Omega^2 + Delta^2), written to avoid cancellation."""
    root = np.sqrt(omega * omega + delta * delta)
    # Omega_+ Omega_- = -Omega^2
    big = np.where(delta <= 0, -delta + root, -delta - root)
    small = -omega * omega / big
    plus = np.where(delta <= 0, big, small)
    minus = np.where(delta <= 0, small, big)
    return plus, minus


def mixing_factors(omega, delta):
    """(N_+, N_-, C) with N_a = 1/sqrt(1 + Omega_a^2/Omega^2), C = (Delta Omega/2)/(Delta^2+Omega^2)."""
    plus, minus = bright_frequencies(omega, delta)
    n_plus = omega / np.sqrt(omega * omega + plus * plus)
    n_minus = omega / np.sqrt(omega * omega + minus * minus)
    c = 0.5 * delta * omega / (delta * delta + omega * omega)
    return n_plus, n_minus, c


def eigensystem(x: float, p, delta: float = 0.0) -> InternalEigensystem:
    oc = float(p.coupling(x))
    op = float(p.probe(x))
    omega = float(np.hypot(oc, op))
    if omega == 0:
        raise ProfileError(f"degenerate internal Hamiltonian at x = {x}: Omega = 0")
    dark = np.array([-op, oc, 0.0]) / omega
    if dark[1] < 0 or (dark[1] == 0 and dark[0] < 0):
        dark = -dark
    plus, minus = bright_frequencies(omega, delta)
    b_plus = np.array([oc, op, plus]) / np.sqrt(omega**2 + plus**2)
    b_minus = np.array([oc, op, minus]) / np.sqrt(omega**2 + minus**2)
    n_plus, n_minus, c = mixing_factors(omega, delta)
    return InternalEigensystem(
        x=float(x), dark=dark, bright_plus=b_plus, bright_minus=b_minus,
        energy_plus=float(plus) / 2, energy_minus=float(minus) / 2,
        n_plus=float(n_plus), n_minus=float(n_minus), c_factor=float(c),
        delta=float(delta), omega=omega,
    )


def numeric_eigensystem(x: float, p, delta: float = 0.0):
    """(energies, vectors) from a dense Hermitian solve, ascending order."""
    return np.linalg.eigh(internal_hamiltonian(float(p.coupling(x)), float(p.probe(x)), delta))


def self_check(es: InternalEigensystem, p, tol: float = 1e-10) -> float:
    """Largest deviation between closed-form and numerical eigenpairs; raises above ``tol``."""
    w, _ = numeric_eigensystem(es.x, p, es.delta)
    closed = np.sort([0.0, es.energy_plus, es.energy_minus])
    err = float(np.max(np.abs(w - closed))) / max(es.omega, abs(es.delta), 1.0)
    h = internal_hamiltonian(float(p.coupling(es.x)), float(p.probe(es.x)), es.delta)
    for vec, val in ((es.dark, 0.0), (es.bright_plus, es.energy_plus), (es.bright_minus, es.energy_minus)):
        err = max(err, float(np.linalg.norm(h @ vec - val * vec)) / max(es.omega, 1.0))
    if err > tol:
        raise ArithmeticError(f"closed-form eigensystem disagrees with dense solve by {err:.3g}")
    return err


def population_g1(x, p):
    """P_g1 = |<g1|D>|^2 = 1 / (1 + f^2); zero at poles of f."""
    f = ratio(x, p)
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.square(f))
    return out


def dark_energy_gap(x, p, delta: float = 0.0):
    """min(|Omega_+|, |Omega_-|) / 2, the distance from the dark level to the nearest bright one."""
    omega = np.hypot(p.coupling(x), p.probe(x))
    if np.any(omega == 0):
        raise ProfileError("total Rabi frequency is zero")
    plus, minus = bright_frequencies(omega, delta)
    return np.minimum(np.abs(plus), np.abs(minus)) / 2
