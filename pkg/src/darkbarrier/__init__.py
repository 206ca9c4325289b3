"""Dark-state non-adiabatic multi-barrier potentials and dipolar two-atom bound states.

Everything inside the package works in reduced units: hbar = 1, k = 1 and
m = 1/2, so that the recoil energy E_R = hbar^2 k^2 / 2m equals 1.  Lengths are
in units of 1/k (one wavelength is 2*pi), angular frequencies in E_R/hbar and
times in hbar/E_R.  SI conversion lives in :mod:`darkbarrier.core`.
"""

from .core import (
    AtomSpecies,
    Grid1D,
    Grid2D,
    UnitSystem,
    make_grid,
    reduced_to_si,
    si_to_reduced,
)
from .fields import (
    FieldProfile,
    PolynomialProfile,
    double_barrier,
    linear_approx,
    triple_barrier,
)

__all__ = [
    "AtomSpecies",
    "FieldProfile",
    "Grid1D",
    "Grid2D",
    "PolynomialProfile",
    "UnitSystem",
    "double_barrier",
    "linear_approx",
    "make_grid",
    "reduced_to_si",
    "si_to_reduced",
    "triple_barrier",
]

__version__ = "0.1.0"
