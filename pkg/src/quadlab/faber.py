"""Faber transforms of rational functions by calculus of residues.

The interior transform (bounded image domain) carries rational functions
vanishing at infinity with poles in the disk to rationals with poles pushed
through the map; the exterior transform additionally maps polynomials to
Faber polynomials.  Pole data travels through exact derivative towers (jets)
of the map, never finite differences:

    T(1/(z - z0)^n)(w) = sum_{k=1..n}  [n * [t^n] u(t)^k / k] / (w - phi(z0))^k

with u(t) = phi(z0 + t) - phi(z0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DerivativeOrderOverflow,
    InteriorContextUnsupported,
    PoleMisplaced,
)
from .jets import laurent_reversion, polynomial_part_of_power
from .maps import EXTERIOR, INTERIOR, MapSpec
from .ratfun import PoleExpansion, RationalFn

MAX_POLE_ORDER = 8


@dataclass(frozen=True)
class FaberContext:
    """Map plus transform direction bookkeeping."""

    spec: MapSpec

    @property
    def exterior(self):
        return self.spec.orientation == EXTERIOR

    @property
    def interior(self):
        return self.spec.orientation == INTERIOR


def _pole_image_terms(spec: MapSpec, z0, coeffs):
    """Principal part of the transform of sum_j coeffs[j] (z-z0)^-(j+1).

    Returns (image point, image coefficients) in the same convention.
    """
    n = len(coeffs)
    if n > MAX_POLE_ORDER:
        raise DerivativeOrderOverflow(f"pole order {n} > {MAX_POLE_ORDER}")
    jet = spec.eval_jet(z0, n)
    w0 = jet[0]
    u = jet.c.copy()
    u[0] = 0.0
    out = np.zeros(n, dtype=complex)
    # powers of u as truncated series
    upow = np.zeros(n + 1, dtype=complex)
    upow[0] = 1.0
    for k in range(1, n + 1):
        upow = _series_mul_trunc(upow, u, n + 1)
        for order in range(k, n + 1):
            # transform of (z-z0)^{-order} contributes at (w-w0)^{-k}
            c_in = coeffs[order - 1]
            if c_in != 0:
                out[k - 1] += c_in * order * upow[order] / k
    return complex(w0), out


def _series_mul_trunc(a, b, n):
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = 0.0 + 0j
        for j in range(min(k, len(a) - 1) + 1):
            i = k - j
            if i < len(b):
                acc += a[j] * b[i]
        out[k] = acc
    return out


def _check_argument_poles(ctx: FaberContext, pe: PoleExpansion, inverse: bool):
    spec = ctx.spec
    for pole, _ in pe.terms:
        if inverse:
            ok = True  # poles live in the image plane; resolved via psi
        elif ctx.interior:
            ok = abs(pole) < 1.0
        else:
            ok = abs(pole) > 1.0
        if not ok:
            raise PoleMisplaced(
                f"argument pole at {pole} is on the wrong side of the circle")


def faber_transform(ctx: FaberContext, f: RationalFn, strict=True) -> RationalFn:
    """Forward transform of a rational argument.

    Interior context: argument must vanish at infinity with poles in the
    disk (constants are annihilated, higher polynomial parts are illegal).
    Exterior context: polynomial parts map through Faber polynomials F_n.
    """
    spec = ctx.spec
    pe = f.partial_fractions()
    if strict:
        _check_argument_poles(ctx, pe, inverse=False)
    poly = np.asarray(pe.poly, dtype=complex)
    out = RationalFn.zero()
    if len(poly) > 1 or (len(poly) == 1 and poly[0] != 0):
        if ctx.interior:
            if len(poly) > 1:
                raise PoleMisplaced(
                    "interior transform of polynomials of positive degree")
            # constants are annihilated by the projection
        else:
            for m, c in enumerate(poly):
                if c != 0:
                    out = out + c * faber_polynomial(ctx, m, which="forward")
    for pole, coeffs in pe.terms:
        w0, image = _pole_image_terms(spec, pole, np.asarray(coeffs, complex))
        out = out + _principal_part(w0, image)
    return out


def inverse_faber_transform(ctx: FaberContext, g: RationalFn,
                            seeds=None) -> RationalFn:
    """Inverse transform: poles of g are pulled back through psi = phi^{-1}."""
    spec = ctx.spec
    pe = g.partial_fractions()
    poly = np.asarray(pe.poly, dtype=complex)
    out = RationalFn.zero()
    if len(poly) > 1 or (len(poly) == 1 and poly[0] != 0):
        if ctx.interior:
            if len(poly) > 1:
                raise PoleMisplaced(
                    "interior inverse transform of polynomials of positive degree")
        else:
            for m, c in enumerate(poly):
                if c != 0:
                    out = out + c * faber_polynomial(ctx, m, which="inverse")
    for pole, coeffs in pe.terms:
        n = len(coeffs)
        if n > MAX_POLE_ORDER:
            raise DerivativeOrderOverflow(f"pole order {n} > {MAX_POLE_ORDER}")
        seed = None if seeds is None else seeds.get(pole)
        z0, psi_jet = spec.inverse_jet(pole, n, seed=seed)
        u = psi_jet.c.copy()
        u[0] = 0.0
        image = np.zeros(n, dtype=complex)
        upow = np.zeros(n + 1, dtype=complex)
        upow[0] = 1.0
        for k in range(1, n + 1):
            upow = _series_mul_trunc(upow, u, n + 1)
            for order in range(k, n + 1):
                c_in = coeffs[order - 1]
                if c_in != 0:
                    image[k - 1] += c_in * order * upow[order] / k
        out = out + _principal_part(z0, image)
    return out


def _principal_part(pole, coeffs):
    return PoleExpansion((0.0,), ((complex(pole), tuple(map(complex, coeffs))),)
                         ).principal_part()


def faber_polynomial(ctx: FaberContext, n: int, which="forward") -> RationalFn:
    """F_n (forward: polynomial part of psi^n) or W_n (inverse: of phi^n)."""
    if ctx.interior and n >= 1:
        raise InteriorContextUnsupported(
            "Faber polynomials of positive degree need an exterior context")
    if n == 0:
        return RationalFn.one()
    if n > 16:
        raise DerivativeOrderOverflow("Faber polynomials supported up to n = 16")
    spec = ctx.spec
    if which == "inverse":
        g = spec.laurent_data(n + 1)
        return RationalFn.from_poly(polynomial_part_of_power(g, n))
    if which != "forward":
        raise ValueError("which must be 'forward' or 'inverse'")
    g = spec.laurent_data(2 * n + 4)
    e = laurent_reversion(g, n + 1)
    return RationalFn.from_poly(polynomial_part_of_power(e, n))


def faber_definition_check(ctx: FaberContext, f: RationalFn, probes,
                           nodes=1024):
    """Residual of the residue-form transform against the defining contour
    integral (1/2 pi i) oint f(psi(xi)) / (xi - w) d xi over the boundary."""
    spec = ctx.spec
    image = faber_transform(ctx, f)
    curve = spec.boundary_curve(nodes)
    z = np.exp(1j * curve.theta)
    fpsi = f(z)  # on the boundary, psi(w(theta)) = e^{i theta}
    worst = 0.0
    for w in probes:
        # projection onto the side complementary to the image domain,
        # counterclockwise around the compact side (stored direction works
        # for exterior maps; interior curves need the sign flip built into
        # the formula below)
        integrand = fpsi / (curve.w - w) * curve.dw_dtheta
        val = np.mean(integrand) / 1j
        if spec.orientation == INTERIOR:
            val = -val  # exterior projection of a bounded domain's boundary
        worst = max(worst, abs(val - image(w)))
    return worst
