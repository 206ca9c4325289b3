"""Barrier geometry: numerical extraction from sampled U0 and the closed-form small-parameter results."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT27 = math.sqrt(27.0)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class BarrierFeatures:
    peaks: list  # [(x, U0)] sorted by x
    dips: list
    well_width: float = math.nan
    spacings: list = field(default_factory=list)
    asymmetry: list = field(default_factory=list)
    kind: str = "numeric"
    warnings: tuple = ()
    k: float = 1.0

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "peaks": [list(p) for p in self.peaks],
            "dips": [list(d) for d in self.dips],
            "well_width": self.well_width,
            "spacings": list(self.spacings),
            "asymmetry": list(self.asymmetry),
            "warnings": list(self.warnings),
        }


def _parabola(xs, ys):
    """Vertex of the parabola through three equally spaced samples."""
    y0, y1, y2 = ys
    h = xs[1] - xs[0]
    denom = y0 - 2 * y1 + y2
    if denom == 0:
        return xs[1], y1
    t = 0.5 * (y0 - y2) / denom
    t = min(max(t, -1.0), 1.0)
    return xs[1] + t * h, y1 - 0.25 * (y0 - y2) * t


def _refine(x, u, i):
    if i <= 0 or i >= len(u) - 1:
        return float(x[i]), float(u[i])
    xv, yv = _parabola(x[i - 1:i + 2], u[i - 1:i + 2])
    return float(xv), float(yv)


def _crossing(x, u, start, stop, level):
    """First x between indices start -> stop (either direction) where u rises through level."""
    step = 1 if stop > start else -1
    for i in range(start, stop, step):
        j = i + step
        if (u[i] - level) * (u[j] - level) <= 0 and u[i] != u[j]:
            t = (level - u[i]) / (u[j] - u[i])
            return float(x[i] + t * (x[j] - x[i]))
    return math.nan


def find_extrema(pg, window=None, rel_height: float = 1e-6, zero_tol: float = 1e-8,
                 k: float = 1.0) -> BarrierFeatures:
    """Locate peaks and inter-peak dips of U0.

    ``pg`` is a PotentialGrid or an ``(x, u0)`` pair.  Extrema come from sign
    changes of the first difference refined by a three-point parabola; dips
    below ``zero_tol`` times the largest peak are reported as exact zeros.
    Peaks lower than ``rel_height`` times the largest are dropped.
    """
    if isinstance(pg, tuple):
        x, u = (np.asarray(a, dtype=float) for a in pg)
    else:
        x, u = np.asarray(pg.x), np.asarray(pg.u0)
    if window is not None:
        lo, hi = window
        keep = (x >= lo) & (x <= hi)
        x, u = x[keep], u[keep]
    if len(x) < 3:
        raise FeatureError("window holds fewer than 3 samples")

    du = np.diff(u)
    peak_idx = [i for i in range(1, len(u) - 1) if du[i - 1] > 0 and du[i] <= 0]
    peaks = [_refine(x, u, i) for i in peak_idx]
    top = max((p[1] for p in peaks), default=0.0)
    kept = [(i, p) for i, p in zip(peak_idx, peaks) if top > 0 and p[1] >= rel_height * top]
    peak_idx = [i for i, _ in kept]
    peaks = [p for _, p in kept]

    dips = []
    for a, b in zip(peak_idx[:-1], peak_idx[1:]):
        j = a + int(np.argmin(u[a:b + 1]))
        xd, ud = _refine(x, u, j)
        if ud < zero_tol * top:
            ud = 0.0
        dips.append((xd, ud))

    width = math.nan
    if len(peaks) >= 2:
        # well around the deepest dip, bounded by its two neighbouring peaks
        w = int(np.argmin([d[1] for d in dips]))
        a, b = peak_idx[w], peak_idx[w + 1]
        j = a + int(np.argmin(u[a:b + 1]))
        half = 0.5 * min(peaks[w][1], peaks[w + 1][1])
        left = _crossing(x, u, j, a, half)
        right = _crossing(x, u, j, b, half)
        width = right - left

    spacings = [q[0] - p[0] for p, q in zip(peaks[:-1], peaks[1:])]
    asym = [p[1] / q[1] for p, q in zip(peaks[:-1], peaks[1:])]
    return BarrierFeatures(peaks=peaks, dips=dips, well_width=width, spacings=spacings,
                           asymmetry=asym, kind="numeric", k=k)


def analytic_double(epsilon: float, d: float = 0.0, k: float = 1.0) -> BarrierFeatures:
    """Closed-form double-barrier features, valid for eps(1-d) << 1.

    Peaks at pi/k +- (4/3)^(1/4) sqrt(u)/k of height sqrt(27)/(8u) E_R, a zero
    at pi/k, and a half-maximum well width 0.2 sqrt(u) lambda, with u = eps(1-d).
    """
    u = epsilon * (1 - d)
    warnings = []
    if not u > 0:
        warnings.append("eps(1-d) <= 0: peak height diverges and the well closes")
        inf = math.inf
        return BarrierFeatures(peaks=[(math.pi / k, inf)], dips=[], well_width=0.0,
                               kind="analytic_double", warnings=tuple(warnings), k=k)
    if u > 0.05:
        warnings.append(f"eps(1-d) = {u:.3g} outside the small-parameter regime (<= 0.05)")
    centre = math.pi / k
    off = (4 / 3) ** 0.25 * math.sqrt(u) / k
    height = SQRT27 / (8 * u)
    peaks = [(centre - off, height), (centre + off, height)]
    return BarrierFeatures(
        peaks=peaks, dips=[(centre, 0.0)], well_width=0.2 * math.sqrt(u) * 2 * math.pi / k,
        spacings=[2 * off], asymmetry=[1.0], kind="analytic_double",
        warnings=tuple(warnings), k=k,
    )


def analytic_triple(phi: float, k: float = 1.0) -> BarrierFeatures:
    """Closed-form triple-barrier features for small phi.

    Central peak 16/phi^2 E_R at x_c = pi/k - phi/2k, zeros at x_c +- phi/2k,
    side peaks 9/(100 phi^2) E_R at x_c +- phi/k.
    """
    warnings = []
    if not 0 < phi <= 0.5:
        warnings.append(f"phi = {phi:.3g} outside the small-phase regime (0, 0.5]")
    xc = (math.pi - phi / 2) / k
    central = 16 / phi**2
    side = 9 / (100 * phi**2)
    peaks = [(xc - phi / k, side), (xc, central), (xc + phi / k, side)]
    dips = [(xc - phi / (2 * k), 0.0), (xc + phi / (2 * k), 0.0)]
    return BarrierFeatures(
        peaks=peaks, dips=dips, spacings=[phi / k, phi / k],
        asymmetry=[side / central, central / side], kind="analytic_triple",
        warnings=tuple(warnings), k=k,
    )


def compare(numeric: BarrierFeatures, analytic: BarrierFeatures, centre: float | None = None) -> dict:
    """Per-feature errors of ``numeric`` against ``analytic``.

    Heights and the well width are relative errors.  Positions are reported
    two ways: absolute error in wavelengths, and relative error of the offset
    from ``centre`` (default: the analytic dip midpoint).
    """
    lam = analytic.wavelength
    report = {"status": "ok", "n_peaks": [len(numeric.peaks), len(analytic.peaks)],
              "n_dips": [len(numeric.dips), len(analytic.dips)]}
    if len(numeric.peaks) != len(analytic.peaks) or len(numeric.dips) != len(analytic.dips):
        report["status"] = "mismatch"
        return report
    if centre is None:
        centre = float(np.mean([d[0] for d in analytic.dips])) if analytic.dips else analytic.peaks[0][0]

    def rel(a, b):
        if a == b:
            return 0.0
        return abs(a - b) / abs(b) if b != 0 else math.inf

    report["peak_heights"] = [rel(n[1], a[1]) for n, a in zip(numeric.peaks, analytic.peaks)]
    report["peak_positions_lambda"] = [abs(n[0] - a[0]) / lam for n, a in zip(numeric.peaks, analytic.peaks)]
    # a peak sitting on the centre has no offset to compare; use its shift in wavelengths
    report["peak_offsets"] = [
        rel(n[0] - centre, a[0] - centre) if a[0] != centre else abs(n[0] - a[0]) / lam
        for n, a in zip(numeric.peaks, analytic.peaks)
    ]
    report["dip_positions_lambda"] = [abs(n[0] - a[0]) / lam for n, a in zip(numeric.dips, analytic.dips)]
    top = max(p[1] for p in numeric.peaks) if numeric.peaks else 1.0
    report["dip_values_over_peak"] = [n[1] / top for n in numeric.dips]
    if not (math.isnan(analytic.well_width) or math.isnan(numeric.well_width)):
        report["well_width"] = rel(numeric.well_width, analytic.well_width)
    report["max_relative_error"] = max(
        [*report["peak_heights"], *report["peak_offsets"], report.get("well_width", 0.0)]
    )
    return report
