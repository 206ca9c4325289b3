import math

import numpy as np
import pytest

from darkbarrier import features as FT
from darkbarrier import fields as F
from darkbarrier.core import make_grid
from darkbarrier.potentials import potential_grid, u0


def numeric(p, lo, hi, n=40001):
    return FT.find_extrema(potential_grid(make_grid(lo, hi, n), p))


def test_double_barrier_structure():
    fx = numeric(F.double_barrier(0.1), 0.0, 2 * math.pi)
    assert len(fx.peaks) == 2 and len(fx.dips) == 1
    assert fx.dips[0][0] == pytest.approx(math.pi, abs=1e-3)
    assert fx.dips[0][1] == 0.0
    assert fx.well_width > 0
    assert fx.peaks[0][0] < fx.dips[0][0] < fx.peaks[1][0]


def test_triple_barrier_structure():
    phi = 0.2
    fx = numeric(F.triple_barrier(phi), math.pi - 0.6, math.pi + 0.4, 100001)
    assert len(fx.peaks) == 3 and len(fx.dips) == 2
    xc = math.pi - phi / 2
    for (xd, ud), ref in zip(fx.dips, (xc - phi / 2, xc + phi / 2)):
        assert xd == pytest.approx(ref, abs=1e-4)
        assert ud == 0.0


def test_flat_profile_has_no_peaks():
    p = F.FieldProfile(1.0, 0.3, a=1.0, b=0.0, c=1.0, d=0.0)
    fx = numeric(p, 0, 2 * math.pi, 1001)
    assert fx.peaks == [] and fx.dips == [] and math.isnan(fx.well_width)


def test_window_too_small():
    with pytest.raises(FT.FeatureError):
        FT.find_extrema((np.array([0.0, 1.0]), np.array([0.0, 1.0])))


def test_analytic_double_examples():
    a = FT.analytic_double(0.1, 0.0)
    off = a.peaks[1][0] - math.pi
    assert off == pytest.approx(0.3398, abs=1e-4)
    assert off / (2 * math.pi) == pytest.approx(0.05407, abs=2e-5)
    assert a.peaks[0][1] == pytest.approx(6.495, abs=1e-3)
    assert a.well_width / (2 * math.pi) == pytest.approx(0.06325, abs=1e-5)
    b, c = FT.analytic_double(0.1, 0.8), FT.analytic_double(0.02, 0.0)
    assert b.peaks == pytest.approx(c.peaks) or all(
        p == pytest.approx(q) for p, q in zip(b.peaks, c.peaks))
    assert b.well_width == pytest.approx(c.well_width)
    assert a.warnings  # 0.1 is outside the small-parameter regime
    lim = FT.analytic_double(0.1, 1.0)
    assert lim.warnings and math.isinf(lim.peaks[0][1]) and lim.well_width == 0.0


def test_analytic_triple_examples():
    t = FT.analytic_triple(0.2)
    assert t.peaks[1] == pytest.approx((math.pi - 0.1, 400.0))
    assert t.peaks[0][1] == pytest.approx(2.25)
    assert t.peaks[0][0] == pytest.approx(math.pi - 0.3)
    assert t.peaks[2][0] == pytest.approx(math.pi + 0.1)
    for phi in (0.1, 0.3):
        s = FT.analytic_triple(phi)
        assert s.peaks[1][1] / s.peaks[0][1] == pytest.approx(1600 / 9)
    assert FT.analytic_triple(0.1).peaks[1][1] == pytest.approx(4 * t.peaks[1][1])
    assert FT.analytic_triple(0.7).warnings


@pytest.mark.parametrize("eps,tol", [(1 / 40, 0.05), (0.1, 0.10)])
def test_compare_double(eps, tol):
    num = numeric(F.double_barrier(eps), math.pi - 1, math.pi + 1, 200001)
    rep = FT.compare(num, FT.analytic_double(eps))
    assert rep["status"] == "ok"
    assert max(rep["peak_heights"]) <= tol
    assert max(rep["peak_offsets"]) <= tol
    assert rep["well_width"] <= 0.15
    assert rep["dip_values_over_peak"][0] <= 1e-8


def test_compare_identity_and_mismatch():
    a = FT.analytic_double(0.02)
    rep = FT.compare(a, a)
    assert rep["max_relative_error"] == 0.0
    assert FT.compare(a, FT.analytic_triple(0.2))["status"] == "mismatch"


def test_agreement_tightens():
    errs = []
    for eps in (0.1, 1 / 40, 1 / 120):
        num = numeric(F.double_barrier(eps), math.pi - 1, math.pi + 1, 400001)
        errs.append(FT.compare(num, FT.analytic_double(eps))["max_relative_error"])
    assert errs[0] > errs[1] > errs[2]


def test_refinement_stability():
    p = F.double_barrier(0.05, 0.3, 0.2)
    lo, hi = math.pi - 1, math.pi + 1
    coarse = numeric(p, lo, hi, 2001)
    fine = numeric(p, lo, hi, 8001)
    h = (hi - lo) / 2000
    for a, b in zip(coarse.peaks + coarse.dips, fine.peaks + fine.dips):
        assert abs(a[0] - b[0]) < h


def test_asymmetric_peaks():
    fx = numeric(F.double_barrier(0.1, 0.8, 0.2), math.pi - 1, math.pi + 1)
    assert abs(fx.asymmetry[0] - 1) > 0.05
