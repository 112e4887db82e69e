import numpy as np
import pytest

from quadlab.errors import InteriorContextUnsupported, PoleMisplaced
from quadlab.faber import (
    FaberContext,
    faber_definition_check,
    faber_polynomial,
    faber_transform,
    inverse_faber_transform,
)
from quadlab.maps import EXTERIOR, INTERIOR, MapSpec
from quadlab.ratfun import RationalFn


@pytest.fixture
def ext_map():
    # phi = c z + f0 + f1/z
    c, f0, f1 = 1.3, 0.2 + 0.1j, -0.3 + 0.05j
    return MapSpec.rational(RationalFn((f1, f0, c), (0.0, 1.0)), EXTERIOR), (c, f0, f1)


def test_simple_pole_formula(cardioid):
    ctx = FaberContext(cardioid)
    z0 = 0.3 - 0.2j
    g = faber_transform(ctx, RationalFn((1.0,), (-z0, 1.0)))
    w = 5.0 + 1.0j
    expect = cardioid.eval_derivative(z0) / (w - cardioid.eval(z0))
    assert abs(g(w) - expect) < 1e-13


def test_double_pole_formula(cardioid):
    ctx = FaberContext(cardioid)
    z0 = 0.25 + 0.1j
    den = np.polynomial.polynomial.polymul([-z0, 1.0], [-z0, 1.0])
    g = faber_transform(ctx, RationalFn((1.0,), den))
    w = 4.0 - 2.0j
    j = cardioid.eval_jet(z0, 2)
    phi0, d1, d2 = j[0], j[1], 2.0 * j[2]
    expect = d2 / (w - phi0) + d1 ** 2 / (w - phi0) ** 2
    assert abs(g(w) - expect) < 1e-12


def test_inverse_simple_pole_formula(cardioid):
    ctx = FaberContext(cardioid)
    w0 = 0.8 + 0.2j
    g = inverse_faber_transform(ctx, RationalFn((1.0,), (-w0, 1.0)))
    z0 = cardioid.eval_inverse(w0)
    psi_p = 1.0 / cardioid.eval_derivative(z0)
    z = 3.0 - 1.0j
    assert abs(g(z) - psi_p / (z - z0)) < 1e-12


def test_faber_polynomials_closed_forms(ext_map):
    m, (c, f0, f1) = ext_map
    ctx = FaberContext(m)
    W1 = faber_polynomial(ctx, 1, "inverse")
    W2 = faber_polynomial(ctx, 2, "inverse")
    assert np.allclose(W1.num_arr, [f0, c])
    assert np.allclose(W2.num_arr, [f0 * f0 + 2 * c * f1, 2 * c * f0, c * c])
    F1 = faber_polynomial(ctx, 1, "forward")
    F2 = faber_polynomial(ctx, 2, "forward")
    assert np.allclose(F1.num_arr, [-f0 / c, 1 / c])
    assert np.allclose(F2.num_arr,
                       [(f0 * f0 - 2 * c * f1) / c ** 2, -2 * f0 / c ** 2, 1 / c ** 2])
    assert np.allclose(faber_polynomial(ctx, 0, "forward").num_arr, [1.0])
    assert np.allclose(faber_polynomial(ctx, 0, "inverse").num_arr, [1.0])


def test_exterior_transform_of_z(ext_map):
    m, (c, f0, f1) = ext_map
    ctx = FaberContext(m)
    g = faber_transform(ctx, RationalFn((0.0, 1.0)))
    assert np.allclose(g.num_arr, [-f0 / c, 1 / c])
    ginv = inverse_faber_transform(ctx, RationalFn((0.0, 1.0)))
    assert np.allclose(ginv.num_arr, [f0, c])


def test_interior_polynomials_unsupported(cardioid):
    ctx = FaberContext(cardioid)
    with pytest.raises(InteriorContextUnsupported):
        faber_polynomial(ctx, 1, "forward")
    with pytest.raises(PoleMisplaced):
        faber_transform(ctx, RationalFn((0.0, 1.0)))


def test_pole_image_law(cardioid, ext_map):
    ctx = FaberContext(cardioid)
    z0 = 0.4 + 0.1j
    g = faber_transform(ctx, RationalFn((1.0,), (-z0, 1.0)))
    poles = [p for p, _ in g.poles()]
    assert len(poles) == 1 and abs(poles[0] - cardioid.eval(z0)) < 1e-10
    ginv = inverse_faber_transform(ctx, g)
    back = [p for p, _ in ginv.poles()]
    assert abs(back[0] - z0) < 1e-10


def test_linearity(cardioid, rng):
    ctx = FaberContext(cardioid)
    f1 = RationalFn((1.0,), (-0.3 + 0.2j, 1.0))
    f2 = RationalFn((0.5,), (0.4j, 1.0))
    al, be = 1.7 - 0.3j, -0.4 + 1.1j
    lhs = faber_transform(ctx, al * f1 + be * f2)
    rhs = al * faber_transform(ctx, f1) + be * faber_transform(ctx, f2)
    w = 3.0 + rng.normal(size=8) + 1j * rng.normal(size=8)
    assert np.max(np.abs(lhs(w) - rhs(w))) < 1e-10


def test_round_trips(cardioid, ext_map):
    ctx = FaberContext(cardioid)
    f = RationalFn((1.0, 0.3), np.polynomial.polynomial.polymul([-0.2, 1], [0.35j, 1]))
    g = inverse_faber_transform(ctx, faber_transform(ctx, f))
    z = 2.5 * np.exp(2j * np.pi * np.arange(9) / 9)
    assert np.max(np.abs(g(z) - f(z))) < 1e-9
    # the spec's 1/(z-2) example: pole outside the disk, non-strict transform
    f2 = RationalFn((1.0,), (-2.0, 1.0))
    g2 = faber_transform(ctx, f2, strict=False)
    assert np.max(np.abs(inverse_faber_transform(ctx, g2)(z) - f2(z))) < 1e-9
    m, _ = ext_map
    ctxe = FaberContext(m)
    f3 = RationalFn((0.3, 1.0), (-(2.0 - 1.0j), 1.0))  # pole outside D: exterior-legal
    g3 = inverse_faber_transform(ctxe, faber_transform(ctxe, f3))
    assert np.max(np.abs(g3(z) - f3(z))) < 1e-9


def test_definition_check(cardioid):
    ctx = FaberContext(cardioid)
    f = RationalFn((1.0,), (-0.35 + 0.15j, 1.0))
    curve = cardioid.boundary_curve(64)
    center = np.mean(curve.w)
    rad = np.max(np.abs(curve.w - center))
    probes = center + 1.8 * rad * np.exp(2j * np.pi * np.arange(20) / 20)
    assert faber_definition_check(ctx, f, probes, nodes=1024) < 1e-8
