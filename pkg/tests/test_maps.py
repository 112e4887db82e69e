import numpy as np
import pytest

from quadlab.errors import AmbiguousPreimage, BranchAmbiguity, NoPreimage
from quadlab.jets import Jet, invert_jet, laurent_reversion
from quadlab.maps import EXTERIOR, INTERIOR, InnerFactor, MapSpec, blaschke
from quadlab.ratfun import RationalFn
from quadlab.schwarzdyn import lambert_w0, teardrop_map


def power_monomial(a, c, gamma):
    r = RationalFn((c ** a, -c ** a * np.conj(gamma)))
    return MapSpec.power(r, a, EXTERIOR)


def test_eval_power_closed_form():
    # a=2, r^#(z) = c^2 (1 - gamma/z), c=1, gamma=0.5 at z=2
    m = power_monomial(2.0, 1.0, 0.5)
    assert abs(m.eval(2.0 + 0j) - 2.0 * np.sqrt(0.75)) < 1e-14


def test_eval_rational_and_log():
    m = MapSpec.rational(RationalFn((0.0, 1.0, 0.5)), INTERIOR)
    assert abs(m.eval(1.0 + 0j) - 1.5) < 1e-15
    r = RationalFn((0.2 * 1.0,), (0.0, 1.0)).conj_coeffs()  # r = c albar / z
    ml = MapSpec.log(RationalFn((0.2,), (0.0, 1.0)), EXTERIOR, prefactor=0.2)
    assert abs(ml.eval(1.0 + 0j) - 0.2 * np.exp(0.2)) < 1e-15


def test_derivative_matches_finite_differences(rng):
    maps = [
        power_monomial(2.0, 1.0, 0.5),
        MapSpec.rational(RationalFn((0.0, 1.0, 0.5)), INTERIOR),
        MapSpec.log(RationalFn((0.0, 0.3)), EXTERIOR, prefactor=1.1),
    ]
    for m in maps:
        pts = (2.0 + 0j, 1.7 - 0.4j) if m.orientation == EXTERIOR \
            else (0.3 + 0.1j, -0.5j)
        for z in pts:
            h = 1e-6
            fd = (m.eval(z + h) - m.eval(z - h)) / (2 * h)
            d = m.eval_derivative(z)
            assert abs(d - fd) / (1 + abs(d)) < 1e-6


def test_derivative_example_sqrt_alpha():
    # phi(z) = w0 e^{sqrt(alpha) z}: phi'(0) = sqrt(alpha) w0
    alpha, w0 = 2.0, 0.25
    r = RationalFn((np.conj(np.sqrt(alpha)),), (0.0, 1.0))
    m = MapSpec.log(r, INTERIOR, prefactor=w0)
    assert abs(m.eval_derivative(0.0 + 0j) - np.sqrt(alpha) * w0) < 1e-14


def test_jet_consistency(rng):
    m = power_monomial(1.7, 1.2, 0.3 + 0.2j)
    z0 = 1.9 - 0.7j
    jet = m.eval_jet(z0, 3)
    assert abs(jet[0] - m.eval(z0)) < 1e-12
    assert abs(jet[1] - m.eval_derivative(z0)) < 1e-11
    h = 1e-5
    fd2 = (m.eval(z0 + h) - 2 * m.eval(z0) + m.eval(z0 - h)) / h ** 2
    assert abs(2 * jet[2] - fd2) < 1e-4


def test_inverse_round_trip(rng):
    maps = [
        power_monomial(2.0, 1.3, 0.4),
        MapSpec.rational(RationalFn((0.0, 1.0, 0.45)), INTERIOR),
        MapSpec.log(RationalFn((0.0, 0.25)), EXTERIOR, prefactor=0.9),
    ]
    for m in maps:
        if m.orientation == EXTERIOR:
            zs = 1.15 + rng.uniform(0, 2.0, 50) * np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
            zs = zs[np.abs(zs) > 1.05]
        else:
            zs = rng.uniform(0, 0.9, 50) * np.exp(1j * rng.uniform(0, 2 * np.pi, 50))
        for z in zs[:50]:
            w = m.eval(z)
            zz = m.eval_inverse(w, seed=z * 1.05)
            assert abs(zz - z) < 1e-10 * (1 + abs(z))


def test_inverse_rational_examples():
    m = MapSpec.rational(RationalFn((0.0, 1.0, 0.5)), INTERIOR)
    assert abs(m.eval_inverse(1.5 + 0j) - 1.0) < 1e-12
    md = MapSpec.rational(RationalFn((0.0, np.sqrt(2.0))), INTERIOR)
    assert abs(md.eval_inverse(0.3 * np.sqrt(2.0)) - 0.3) < 1e-14
    with pytest.raises(NoPreimage):
        m.eval_inverse(10.0 + 0j)  # far outside the cardioid


def test_teardrop_inverse_lambert():
    m = teardrop_map()
    for w in (5.0 + 1.0j, -4.0 + 3.0j, 7.0):
        psi_w = -1.0 / lambert_w0(-1.0 / w)
        z = m.eval_inverse(w, seed=w)
        assert abs(z - psi_w) < 1e-9 * (1 + abs(w))


def test_boundary_curve_branch_continuity():
    m = power_monomial(2.0, 1.3, 0.8)
    curve = m.boundary_curve(256)
    # differences along the curve stay small (no branch jumps)
    steps = np.abs(np.diff(curve.w))
    assert steps.max() < 10 * np.median(steps)
    # pointwise agreement with scalar eval at a few angles
    for k in (3, 77, 200):
        assert abs(m.eval(np.exp(1j * curve.theta[k])) - curve.w[k]) < 1e-10


def test_boundary_disk_example():
    md = MapSpec.rational(RationalFn((0.0, np.sqrt(2.0))), INTERIOR)
    curve = md.boundary_curve(16)
    assert np.allclose(np.abs(curve.w), np.sqrt(2.0))


def test_cardioid_cusp_point():
    m = MapSpec.rational(RationalFn((0.0, 1.0, 0.5)), INTERIOR)
    w = m.boundary_values(np.array([np.pi]))
    assert abs(w[0] - (-0.5)) < 1e-14


def test_monomial_boundary_touches_origin():
    m = power_monomial(2.0, 1.0, 0.999999)
    curve = m.boundary_curve(512)
    assert curve.min_abs() < 2e-3


def test_exterior_normalization_invariant():
    for m in (power_monomial(2.0, 1.3, 0.4),
              MapSpec.log(RationalFn((0.0, 0.25)), EXTERIOR, prefactor=0.9)):
        c = m.conformal_radius()
        assert abs(c.imag) < 1e-12 and c.real > 0
        R = 1e6
        assert abs(m.eval(R + 0j) / R - c) < R * 1e-8


def test_inner_factor_unit_modulus():
    inner = InnerFactor(True, (1.7 + 0.5j,))
    f = inner.to_ratfn()
    theta = np.linspace(0, 2 * np.pi, 64)
    vals = np.abs(f(np.exp(1j * theta)))
    assert np.max(np.abs(vals - 1.0)) < 1e-12


def test_laurent_data_power_map():
    # phi = c z (1 - g/z)^(1/a) = c z - c g/a + ...
    a, c, g = 2.0, 1.3, 0.4 + 0.1j
    m = power_monomial(a, c, g)
    data = m.laurent_data(3)
    assert abs(data[0] - c) < 1e-12
    assert abs(data[1] - (-c * g / a)) < 1e-12


def test_json_round_trip():
    m = MapSpec.power(RationalFn((1.0, -0.4)), 2.0, EXTERIOR,
                      inner=InnerFactor(True, (2.0 + 1.0j,)), prefactor=1.0)
    m2 = MapSpec.from_json(m.to_json())
    z = 2.2 - 1.1j
    assert abs(m.eval(z) - m2.eval(z)) < 1e-12


def test_jets_and_reversion():
    # exp jet against closed form
    j = Jet.variable(0.3, 5)
    e = j.exp()
    expect = np.exp(0.3) / np.array([1, 1, 2, 6, 24, 120])
    assert np.allclose(e.c.real, expect) and np.allclose(e.c.imag, 0)
    # inversion: f(z) = e^z - 1 about 0, inverse log(1+w)
    f = Jet(np.array([0.0, 1.0, 0.5, 1 / 6, 1 / 24, 1 / 120], dtype=complex))
    g = invert_jet(f)
    expect = np.array([0, 1, -1 / 2, 1 / 3, -1 / 4, 1 / 5], dtype=complex)
    assert np.allclose(g.c, expect, atol=1e-12)
    # Laurent reversion of phi = 2z + 1 + 0.5/z
    e = laurent_reversion(np.array([2.0, 1.0, 0.5], dtype=complex), 6)
    assert np.allclose(e, [0.5, -0.5, -0.5, -0.5, -1.0, -2.0], atol=1e-12)
    w = 100.0
    z = e[0] * w + e[1] + np.sum(e[2:] / w ** np.arange(1, len(e) - 1))
    assert abs(2 * z + 1 + 0.5 / z - w) < 1e-8
