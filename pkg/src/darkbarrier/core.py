"""Units, constants, grids and output serialization shared by every module.

Reduced units: hbar = 1, k = 1, m = 1/2, hence E_R = 1.  The four supported
conversion kinds are length, energy, (angular) frequency and time.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

# CODATA 2018
HBAR = 1.054571817e-34  # J s
H_PLANCK = 6.62607015e-34  # J s
MU0 = 1.25663706212e-6  # N A^-2
AMU = 1.66053906660e-27  # kg
MU_B = 9.2740100783e-24  # J/T

CONSTANTS = {
    "hbar": HBAR,
    "h": H_PLANCK,
    "mu0": MU0,
    "amu": AMU,
    "mu_B": MU_B,
}

# hbar^2 / 2m in reduced units; the kinetic operator is -KINETIC * d^2/dx^2
KINETIC = 1.0
REDUCED_MASS = 0.5

Kind = Literal["length", "energy", "frequency", "time"]
KINDS = ("length", "energy", "frequency", "time")


class UnitError(ValueError):
    pass


@dataclass(frozen=True)
class AtomSpecies:
    """An atom: mass [kg], excited-state linewidth gamma [rad/s], transition
    wavelength [m] and maximum magnetic moment mu_max [J/T]."""

    name: str
    mass: float
    gamma: float
    wavelength: float
    mu_max: float

    def __post_init__(self):
        for key in ("mass", "gamma", "wavelength", "mu_max"):
            value = getattr(self, key)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"AtomSpecies.{key} must be positive, got {value!r}")

    @property
    def k(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def recoil_energy(self) -> float:
        return HBAR**2 * self.k**2 / (2 * self.mass)

    @property
    def recoil_frequency(self) -> float:
        """E_R / hbar in rad/s."""
        return self.recoil_energy / HBAR


def yb171(wavelength: float = 532e-9, mu_max: float = MU_B) -> AtomSpecies:
    # mu_max is nominal; bound-state runs are parametrized by a_dd directly
    return AtomSpecies(
        name="Yb171",
        mass=170.9363302 * AMU,
        gamma=2 * math.pi * 182e3,
        wavelength=wavelength,
        mu_max=mu_max,
    )


def cr52(wavelength: float = 532e-9) -> AtomSpecies:
    return AtomSpecies(
        name="Cr52",
        mass=51.9405062 * AMU,
        gamma=2 * math.pi * 5.0e6,
        wavelength=wavelength,
        mu_max=6 * MU_B,
    )


SPECIES_PRESETS = {"Yb171": yb171, "Cr52": cr52}


def _scale(kind: str, species: AtomSpecies) -> float:
    """SI value of one reduced unit of ``kind``."""
    if kind == "length":
        return 1.0 / species.k
    if kind == "energy":
        return species.recoil_energy
    if kind == "frequency":
        return species.recoil_frequency
    if kind == "time":
        return 1.0 / species.recoil_frequency
    raise UnitError(f"unknown quantity kind {kind!r}; expected one of {KINDS}")


def si_to_reduced(value, kind: Kind, species: AtomSpecies):
    """Express an SI quantity (m, J, rad/s or s) in reduced units."""
    scale = _scale(kind, species)
    if np.ndim(value):
        return np.asarray(value, dtype=float) / scale
    return float(value) / scale


def reduced_to_si(value, kind: Kind, species: AtomSpecies):
    scale = _scale(kind, species)
    if np.ndim(value):
        return np.asarray(value, dtype=float) * scale
    return float(value) * scale


@dataclass(frozen=True)
class UnitSystem:
    mode: Literal["reduced", "si"] = "reduced"
    reference: AtomSpecies | None = None

    def __post_init__(self):
        if self.mode not in ("reduced", "si"):
            raise UnitError(f"unknown unit mode {self.mode!r}")
        if self.mode == "si" and self.reference is None:
            raise UnitError("SI unit system needs a reference species")

    def to_reduced(self, value, kind: Kind):
        if self.mode == "reduced":
            return value
        return si_to_reduced(value, kind, self.reference)

    def from_reduced(self, value, kind: Kind):
        if self.mode == "reduced":
            return value
        return reduced_to_si(value, kind, self.reference)


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int
    boundary: Literal["dirichlet", "periodic"] = "dirichlet"
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.boundary not in ("dirichlet", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"grid needs n >= 3 points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"grid bounds inverted: [{self.x_min}, {self.x_max}]")
        pts = self.x_min + self.spacing * np.arange(self.n)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def spacing(self) -> float:
        intervals = self.n - 1 if self.boundary == "dirichlet" else self.n
        return (self.x_max - self.x_min) / intervals

    @property
    def interior(self) -> np.ndarray:
        """Points carrying unknowns: Dirichlet drops both end points."""
        return self.points[1:-1] if self.boundary == "dirichlet" else self.points


def make_grid(x_min: float, x_max: float, n: int, boundary: str = "dirichlet") -> Grid1D:
    return Grid1D(float(x_min), float(x_max), int(n), boundary.lower())


DEFAULT_MAX_DIM = 250**2


@dataclass(frozen=True)
class Grid2D:
    """Product grid for two atoms sharing one axis."""

    axis: Grid1D
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if self.dim > self.max_dim:
            raise ValueError(f"2D grid dimension {self.dim} exceeds cap {self.max_dim}")

    @property
    def dim(self) -> int:
        return len(self.axis.interior) ** 2

    def mesh(self):
        x = self.axis.interior
        return np.meshgrid(x, x, indexing="ij")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def fmt_float(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    """CSV with 17 significant digits, ',' delimiter and '\\n' line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(v) for v in row])
    return buf.getvalue()


def table_csv(table: dict) -> str:
    columns = list(table)
    arrays = [np.asarray(table[c]) for c in columns]
    n = len(arrays[0]) if arrays else 0
    return csv_text(columns, (tuple(a[i] for a in arrays) for i in range(n)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v) or math.isinf(v):
            return fmt_float(v)
        return v
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
