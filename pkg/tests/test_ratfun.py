import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlab.errors import NearMultiplePole, PoleOnCircle
from quadlab.maps import blaschke
from quadlab.ratfun import (
    RationalFn,
    aberth_roots,
    cauchy_project_circle,
    cluster_roots,
    partial_fractions,
)

from conftest import random_ratfn


def test_eval_horner_matches_numpy(rng):
    f = RationalFn((1.0, 2.0, 3.0), (0.5, 0.0, 1.0))
    z = rng.normal(size=20) + 1j * rng.normal(size=20)
    expect = np.polyval([3, 2, 1], z) / np.polyval([1, 0, 0.5], z)
    assert np.allclose(f(z), expect, rtol=1e-13)


def test_canonical_monic_and_cancellation():
    # (z-1)(z-2) / (2 (z-1)(z-3)) cancels the common root and scales monic
    num = np.convolve([-1, 1], [-2, 1])[::-1][::-1]
    f = RationalFn(np.polynomial.polynomial.polymul([-1, 1], [-2, 1]),
                   2.0 * np.polynomial.polynomial.polymul([-1, 1], [-3, 1]))
    assert len(f.num) == 2 and len(f.den) == 2
    assert abs(f.den[-1] - 1.0) < 1e-14
    z = 5.7 + 0.3j
    assert abs(f(z) - (z - 2) / (2 * (z - 3))) < 1e-12


def test_aberth_simple_and_multiple():
    roots = aberth_roots([6.0, -11.0, 6.0, -1.0])  # (z-1)(z-2)(z-3) * -1
    assert np.allclose(sorted(roots.real), [1, 2, 3], atol=1e-11)
    # exact factored zeros at the origin
    r2 = aberth_roots([0.0, 0.0, 0.0, 1.0])
    assert np.all(r2 == 0)
    clusters = cluster_roots(aberth_roots([1.0, -4.0, 6.0, -4.0, 1.0]),
                             poly=[1.0, -4.0, 6.0, -4.0, 1.0])  # (z-1)^4
    assert len(clusters) == 1
    center, mult = clusters[0]
    assert mult == 4 and abs(center - 1.0) < 1e-10


def test_reflect_examples():
    # reflect(z) = 1/z
    f = RationalFn((0.0, 1.0))
    g = f.reflect()
    assert np.allclose(g(2.0 + 0j), 0.5)
    # reflect(c z + f0 + f1/z) = conj(c)/z + conj(f0) + conj(f1) z
    c, f0, f1 = 1.0 + 2.0j, 0.3 - 0.1j, -0.7 + 0.25j
    f = RationalFn((f1, f0, c), (0.0, 1.0))
    g = f.reflect()
    z = 0.8 - 0.4j
    expect = np.conj(c) / z + np.conj(f0) + np.conj(f1) * z
    assert abs(g(z) - expect) < 1e-13


def test_blaschke_reflection_inverts(rng):
    lam = 0.3 + 0.4j
    b = blaschke(lam)
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    assert np.max(np.abs(b.reflect()(z) * b(z) - 1.0)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_reflect_involution(seed):
    f = random_ratfn(np.random.default_rng(seed))
    g = f.reflect().reflect()
    assert len(g.num) == len(f.num) and len(g.den) == len(f.den)
    assert np.max(np.abs(g.num_arr - f.num_arr)) < 1e-12 * (1 + np.max(np.abs(f.num_arr)))
    assert np.max(np.abs(g.den_arr - f.den_arr)) < 1e-12


def test_partial_fractions_two_pole():
    f = RationalFn((1.0,), (-1.0, 0.0, 1.0))  # 1/(z^2 - 1)
    pe = partial_fractions(f)
    terms = dict((round(p.real, 6), cs) for p, cs in pe.terms)
    assert abs(terms[1.0][0] - 0.5) < 1e-12
    assert abs(terms[-1.0][0] + 0.5) < 1e-12
    assert np.allclose(pe.poly, [0.0])


def test_partial_fractions_polynomial_passthrough():
    f = RationalFn((2.0, 0.0, 3.0))
    pe = partial_fractions(f)
    assert pe.terms == ()
    assert np.allclose(pe.poly, [2.0, 0.0, 3.0])


def test_partial_fractions_reconstruction(rng):
    # (z^3+2)/((z-0.5)^2 (z+2))
    den = np.polynomial.polynomial.polymul(
        np.polynomial.polynomial.polymul([-0.5, 1], [-0.5, 1]), [2, 1])
    f = RationalFn((2.0, 0.0, 0.0, 1.0), den)
    pe = partial_fractions(f)
    z = rng.normal(size=20) * 3 + 1j * rng.normal(size=20) * 3
    z = z[np.abs(z - 0.5) > 0.3]
    z = z[np.abs(z + 2.0) > 0.3]
    rel = np.abs(pe(z) - f(z)) / (1 + np.abs(f(z)))
    assert np.max(rel) < 1e-9


def test_partial_fractions_random_property(rng):
    for _ in range(25):
        f = random_ratfn(rng, max_deg=4, pole_sep=0.12)
        pe = partial_fractions(f)
        z = rng.normal(size=20) * 2 + 1j * rng.normal(size=20) * 2
        poles = [p for p, _ in pe.terms]
        if poles:
            z = z[np.min(np.abs(z[:, None] - np.array(poles)[None, :]), axis=1) > 0.15]
        rel = np.abs(pe(z) - f(z)) / (1 + np.abs(f(z)))
        assert np.max(rel) < 1e-9


def test_near_multiple_pole_guard():
    # separation in the ambiguous band: far beyond double-root scatter but
    # inside the merge window, so deflation cannot be trusted either way
    den = np.polynomial.polynomial.polymul([-1.0, 1.0], [-(1.0 + 1.5e-6), 1.0])
    f = RationalFn((1.0,), den, canonicalize=False)
    with pytest.raises(NearMultiplePole):
        partial_fractions(f)


def test_cauchy_projection_split(rng):
    # project(z^{-1}, interior) = 0
    f = RationalFn((1.0,), (0.0, 1.0))
    assert cauchy_project_circle(f, "interior").is_zero(tol=1e-14)
    # polynomial + inner principal part splits exactly
    g = RationalFn((1.0, 2.0), (1.0,)) + RationalFn((0.5,), (-0.2, 1.0))
    gi = cauchy_project_circle(g, "interior")
    ge = cauchy_project_circle(g, "exterior")
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, 20)) * rng.uniform(0.9, 1.1, 20)
    assert np.max(np.abs(gi(z) + ge(z) - g(z))) < 1e-9
    assert np.max(np.abs(gi(z) - (1 + 2 * z))) < 1e-10


def test_cauchy_projection_paper_example():
    # (1 - g/z)(1 - conj(g) z) projects onto 1 + |g|^2 - conj(g) z
    g = 0.5
    f = RationalFn((-g, 1.0), (0.0, 1.0)) * RationalFn((1.0, -np.conj(g)))
    proj = cauchy_project_circle(f, "interior")
    z = np.array([0.3 + 0.1j, -0.2j, 0.9])
    assert np.max(np.abs(proj(z) - (1 + abs(g) ** 2 - np.conj(g) * z))) < 1e-12


def test_projection_sum_property(rng):
    for _ in range(10):
        f = random_ratfn(rng, max_deg=4)
        if any(abs(abs(p) - 1) < 0.05 for p, _ in f.poles()):
            continue
        fi = cauchy_project_circle(f, "interior")
        fe = cauchy_project_circle(f, "exterior")
        theta = rng.uniform(0, 2 * np.pi, 20)
        z = np.exp(1j * theta) * rng.uniform(0.95, 1.05, 20)
        poles = [p for p, _ in f.poles()]
        if poles:
            z = z[np.min(np.abs(z[:, None] - np.array(poles)[None, :]), axis=1) > 0.1]
        rel = np.abs(fi(z) + fe(z) - f(z)) / (1 + np.abs(f(z)))
        assert np.max(rel) < 1e-9


def test_pole_on_circle_guard():
    f = RationalFn((1.0,), (-1.0, 1.0))
    with pytest.raises(PoleOnCircle):
        cauchy_project_circle(f, "interior")


def test_laurent_at_infinity():
    c, albar = 1.2, 0.3 - 0.2j
    f = RationalFn((c * albar, 0.0, c), (0.0, 1.0))  # c z + c albar / z
    coeffs = f.laurent_at_infinity(3)
    assert np.allclose(coeffs, [c, 0.0, c * albar])
    assert np.allclose(RationalFn((5.0,)).laurent_at_infinity(1), [5.0])
    g = RationalFn((0.0, 0.0, 1.0), (-1.0, 1.0))  # z^2/(z-1)
    assert np.allclose(g.laurent_at_infinity(5), [1, 1, 1, 1, 1])


def test_json_round_trip():
    f = RationalFn((1.0 + 2.0j, 0.5), (0.25 - 1.0j, 0.0, 1.0))
    g = RationalFn.from_json(f.to_json())
    assert np.allclose(g.num_arr, f.num_arr) and np.allclose(g.den_arr, f.den_arr)


def test_compose_affine_and_inverse():
    f = RationalFn((1.0,), (-2.0, 1.0))      # 1/(w-2)
    g = f.compose_affine(2.0, 1.0)           # 1/((w-1)/2 - 2)
    w = 7.3 + 0.2j
    assert abs(g(w) - 1.0 / ((w - 1.0) / 2.0 - 2.0)) < 1e-13
    inv = RationalFn((1.0,), (0.0, 1.0))
    h = f.compose(inv)                        # 1/(1/w - 2)
    assert abs(h(w) - 1.0 / (1.0 / w - 2.0)) < 1e-13
