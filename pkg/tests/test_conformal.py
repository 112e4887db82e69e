import numpy as np
import pytest

from quadlab import classical, lqd, pqd
from quadlab.conformal import (
    corner_detect,
    cusp_detect,
    locate_transition,
    starlike_test,
    univalence_check,
)
from quadlab.maps import EXTERIOR, INTERIOR, MapSpec
from quadlab.ratfun import RationalFn


def quad_map(b):
    return MapSpec.rational(RationalFn((0.0, 1.0, b)), INTERIOR)


def test_verdicts_quadratic_family():
    assert univalence_check(quad_map(0.4)).verdict == "univalent"
    assert univalence_check(quad_map(0.5)).verdict == "cusped"
    rep = univalence_check(quad_map(0.6))
    assert rep.verdict == "selfIntersecting"
    assert rep.witnesses, "crossing witnesses recorded"
    t1, t2 = rep.witnesses[0]
    w1 = quad_map(0.6).eval(np.exp(1j * t1))
    w2 = quad_map(0.6).eval(np.exp(1j * t2))
    assert abs(w1 - w2) < 1e-8


def test_univalent_report_invariants(ellipse_map):
    rep = univalence_check(ellipse_map)
    assert rep.univalent and rep.witnesses == [] and rep.margin > 0


def test_not_analytic_power_map():
    # monomial with |gamma| > 1 has a power-base zero inside the domain
    spec, verdict = pqd.monomial_family(2.0, 0.5, 1, 0.9)
    assert verdict == "notAnalytic"
    assert univalence_check(spec).verdict == "notAnalytic"


def test_starlike_values():
    mz = MapSpec.rational(RationalFn((0.0, 1.0)), INTERIOR)
    assert abs(starlike_test(mz) - 1.0) < 1e-12
    # bounded one-point power map, case (c): margin stays positive
    spec, diags = pqd.one_point_power(2.0, 0.9, 0.7, bounded=True)
    assert starlike_test(spec) > 0
    # basic monomial at the critical radius: margin 0 within 1e-6
    a, alpha = 0.4, 25.0 / 12.0
    cstar = pqd.monomial_critical_radius(a, alpha)
    specc, _ = pqd.monomial_family(a, alpha, 1, cstar)
    assert abs(starlike_test(specc, n=8192)) < 1e-6


def test_cusp_detect_cases(cardioid, disk_map):
    cusps = cusp_detect(cardioid)
    assert len(cusps) == 1
    theta, kind = cusps[0]
    assert abs(theta - np.pi) < 1e-10 and kind == "(3,2)"
    assert cusp_detect(disk_map) == []
    # critical one-point classical map (alpha < 0): cusp at theta = 0
    cs = classical.c_star_negative(-0.5, 2.0)
    spec, verdict = classical.one_point_family(-0.5, 2.0, cs)
    cusps = cusp_detect(spec)
    assert any(min(t, 2 * np.pi - t) < 1e-6 for t, _kind in cusps)


def test_corner_detect_separate():
    # monomial power map exactly touching the origin: a corner, not a cusp
    a, alpha = 2.0, 0.5
    c_touch = (a * alpha) ** (1.0 / (2 * a - 1.0))
    spec, _ = pqd.monomial_family(a, alpha, 1, c_touch)
    corners = corner_detect(spec)
    assert len(corners) == 1
    theta, angle = corners[0]
    assert abs(angle - np.pi / a) < 1e-12
    assert all(abs(t - theta) > 1e-9 for t, _k in cusp_detect(spec))


def test_whitney_graustein_transition():
    # quadratic family b in [0.4, 0.6]: the refined transition is a cusp
    b_crit, rep = locate_transition(lambda b: quad_map(b), 0.4, 0.6, tol=1e-9)
    assert abs(b_crit - 0.5) < 1e-6
    assert rep.verdict == "cusped"


def test_lqd_monomial_transition_is_cusp():
    al, k = 0.8, 2
    cstar = lqd.monomial_univalence_threshold(al, k)
    c_crit, rep = locate_transition(lambda c: lqd.monomial_map(al, k, c),
                                    0.9 * cstar, 1.1 * cstar, tol=1e-9, n=4096)
    assert abs(c_crit - cstar) < 1e-6
    assert rep.verdict == "cusped"


def test_argument_principle_counts(cardioid):
    rep = univalence_check(cardioid, n=1024)
    assert rep.verdict == "cusped"  # boundary cusp, but counts still valid
