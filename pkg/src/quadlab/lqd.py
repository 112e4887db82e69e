"""Log-weighted quadrature domains (weight |w|^-2, origin away from closure).

Maps take the exponential form phi = phi(0) e^{r^#} (bounded) or
phi = c z e^{r^#} (unbounded) with rational r; the direct problem is
h(w) = (T(w) - T(0))/w with T the Faber transform of r.  The origin must
stay clear of the closure: boundary samples are checked against a hard
margin because the singular case is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conformal, solvers
from .errors import (
    BoundaryThroughOrigin,
    MissingSolution,
    NoConvergence,
    QuadlabError,
)
from .faber import FaberContext, faber_transform
from .maps import EXTERIOR, INTERIOR, InnerFactor, MapSpec
from .pqd import monomial_family
from .ratfun import RationalFn, cauchy_project_circle

ORIGIN_MARGIN = 1e-6


@dataclass(frozen=True)
class LQDProblem:
    h: RationalFn
    bounded: bool

    def __post_init__(self):
        if self.bounded and self.h.degree() >= 0 and not self.h.is_zero():
            raise QuadlabError("bounded quadrature functions vanish at infinity")

    def to_json_obj(self):
        return {"a": 0.0, "h": self.h.to_json_obj(), "bounded": self.bounded}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(RationalFn.from_json_obj(obj["h"]), bool(obj["bounded"]))


@dataclass
class LQDSolution:
    spec: MapSpec
    residual: float
    univalence: conformal.UnivalenceReport | None = None
    warnings: list = field(default_factory=list)


def assert_origin_clear(m: MapSpec, nodes=512, margin=ORIGIN_MARGIN):
    curve = m.boundary_curve(nodes)
    dist = curve.min_abs()
    if dist < margin:
        raise BoundaryThroughOrigin(
            f"boundary approaches the origin to {dist:.2e} < {margin}")
    if m.orientation == INTERIOR and curve.contains(0.0):
        raise BoundaryThroughOrigin("bounded log-weighted domain contains 0")
    return dist


def direct_problem_log(m: MapSpec, check_origin=True) -> RationalFn:
    """h(w) = (T(w) - T(0))/w with T = Faber transform of r."""
    if m.kind != "log":
        raise QuadlabError("direct_problem_log needs a log map")
    if check_origin:
        assert_origin_clear(m)
    ctx = FaberContext(m)
    r = m.r
    if m.orientation == INTERIOR:
        arg = cauchy_project_circle(r, "exterior")
    else:
        arg = cauchy_project_circle(r, "interior")
    T = faber_transform(ctx, arg)
    from .pqd import _divide_out_w

    return _divide_out_w(T, T(0.0))


def inverse_problem_log(p: LQDProblem, w0=None, c=None, tol=1e-8,
                        check_univalence=True) -> LQDSolution:
    """Reconstruct the exponential-form map from its quadrature function."""
    h = p.h
    if h.is_zero():
        if p.bounded:
            raise QuadlabError("null log-weighted domains are exterior disks")
        if c is None:
            raise QuadlabError("exterior disks need the conformal radius")
        spec = MapSpec.log(RationalFn.zero(), EXTERIOR, prefactor=float(c))
        sol = LQDSolution(spec, 0.0)
        if check_univalence:
            sol.univalence = conformal.univalence_check(spec)
        return sol
    if p.bounded:
        if w0 is None:
            raise QuadlabError("bounded inverse problem needs w0")
        sol = _inverse_log_bounded(h, complex(w0), tol)
    else:
        if c is None:
            raise QuadlabError("unbounded inverse problem needs c")
        sol = _inverse_log_unbounded(h, float(c), tol)
    if check_univalence:
        sol.univalence = conformal.univalence_check(sol.spec)
        if not sol.univalence.univalent:
            sol.warnings.append(f"map is {sol.univalence.verdict}")
    return sol


def one_point_bounded_map(alpha, w0) -> MapSpec:
    """phi(z) = w0 e^{sqrt(alpha) z}: the bounded one-point solution."""
    alpha = complex(alpha)
    # r^#(z) = sqrt(alpha) z  <=>  r(z) = conj(sqrt(alpha)) / z
    r = RationalFn((np.conj(np.sqrt(alpha)),), (0.0, 1.0))
    return MapSpec.log(r, INTERIOR, prefactor=complex(w0))


def monomial_map(alpha, k, c) -> MapSpec:
    """phi(z) = c z exp(conj(alpha) k c^k / z^k): QD_0(alpha k w^(k-1))."""
    alpha = complex(alpha)
    rs_coeff = np.conj(alpha) * k * c ** k
    # r^# = rs_coeff / z^k  =>  r = conj(rs_coeff) z^k
    r = RationalFn((0.0,) * k + (np.conj(rs_coeff),))
    return MapSpec.log(r, EXTERIOR, prefactor=float(c))


def monomial_univalence_threshold(alpha, k):
    """|alpha k^2 c^k| = 1 gives c = |alpha k^2|^(-1/k)."""
    return abs(complex(alpha) * k * k) ** (-1.0 / k)


def _inverse_log_bounded(h: RationalFn, w0, tol):
    pe = h.partial_fractions()
    if np.any(np.abs(np.asarray(pe.poly))):
        raise QuadlabError("bounded quadrature functions have no polynomial part")
    # fast path: single simple pole -> w0_pole e^{sqrt(alpha) z} when the pole
    # is the base point
    if len(pe.terms) == 1 and len(pe.terms[0][1]) == 1 \
            and abs(pe.terms[0][0] - w0) < 1e-12:
        alpha = pe.terms[0][1][0]
        spec = one_point_bounded_map(alpha, w0)
        return LQDSolution(spec, 0.0)
    poles = [(pp, len(cs)) for pp, cs in pe.terms]
    samples = solvers.h_sample_points(h)
    n_poles = len(poles)

    def build(params):
        zs = params[:n_poles]
        rest = list(params[n_poles:])
        r = RationalFn.zero()
        for (pp, mult), z_k in zip(poles, zs):
            base = RationalFn((1.0,), (-complex(z_k), 1.0))
            powk = RationalFn.one()
            for _j in range(mult):
                powk = powk * base
                r = r + complex(rest.pop(0)) * powk
        return MapSpec.log(r, INTERIOR, prefactor=w0)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for (pp, _), z_k in zip(poles, params[:n_poles]):
                out.append(spec.eval(complex(z_k)) - pp)
            try:
                hc = direct_problem_log(spec, check_origin=False)
            except QuadlabError:
                return np.full(n_poles + len(samples), 1e3, dtype=complex)
            out.extend(solvers.sampled_mismatch(hc, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    x0 = []
    for pp, _ in poles:
        g = (pp - w0) / (abs(w0) + 1.0)
        x0.append(0.4 * g / max(abs(g), 1.0))
    for _pp, mult in poles:
        x0.extend([0.2] * mult)
    params, rnorm = solvers.solve_with_homotopy(
        make_residual, x0, stages=(0.4, 0.7, 1.0), tol=tol,
        label="bounded log inverse problem")
    from .pqd import _fix_interior_rotation

    return LQDSolution(_fix_interior_rotation(build(params)), rnorm)


def _inverse_log_unbounded(h: RationalFn, c, tol):
    pe = h.partial_fractions()
    poly = np.asarray(pe.poly, dtype=complex)
    poly_deg = len(poly) - 1 if np.any(np.abs(poly)) else -1
    poles = [(pp, len(cs)) for pp, cs in pe.terms]
    samples = solvers.h_sample_points(h)
    n_poles = len(poles)

    def build(params):
        zs = params[:n_poles]
        rest = list(params[n_poles:])
        r = RationalFn.zero()
        for i in range(poly_deg + 1):
            r = r + complex(rest.pop(0)) * RationalFn((0.0,) * (i + 1) + (1.0,))
        for (pp, mult), z_k in zip(poles, zs):
            base = RationalFn((1.0,), (-complex(z_k), 1.0))
            powk = RationalFn.one()
            terms = RationalFn.zero()
            for _j in range(mult):
                powk = powk * base
                terms = terms + complex(rest.pop(0)) * powk
            # pin r(0) = 0 pole-block-wise so phi ~ c z at infinity
            terms = terms - complex(terms(0.0))
            r = r + terms
        return MapSpec.log(r, EXTERIOR, prefactor=c)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for (pp, _), z_k in zip(poles, params[:n_poles]):
                out.append(spec.eval(complex(z_k)) - pp)
            try:
                hc = direct_problem_log(spec, check_origin=False)
            except QuadlabError:
                return np.full(n_poles + len(samples), 1e3, dtype=complex)
            out.extend(solvers.sampled_mismatch(hc, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    x0 = []
    for pp, _ in poles:
        g = pp / c
        if abs(g) < 1.3:
            g = 1.3 * g / max(abs(g), 1e-9)
        x0.append(g)
    x0.extend([0.1 + 0.0j] * (poly_deg + 1))
    for _pp, mult in poles:
        x0.extend([0.2] * mult)
    params, rnorm = solvers.solve_with_homotopy(
        make_residual, x0, stages=(0.4, 0.7, 1.0), tol=tol,
        label="unbounded log inverse problem")
    return LQDSolution(build(params), rnorm)


# ---------------------------------------------------------------------------
# inversion symmetry and the a -> 0 limit
# ---------------------------------------------------------------------------

def invert_domain(p: LQDProblem) -> LQDProblem:
    """Omega -> Omega^{-1}: h_tilde(w) = -h(1/w) w^{-2}."""
    if not p.bounded:
        raise QuadlabError("inversion symmetry is stated for bounded domains")
    inv = RationalFn((1.0,), (0.0, 1.0))    # 1/w
    h_new = -(p.h.compose(inv) * inv * inv)
    return LQDProblem(h_new, bounded=True)


@dataclass
class LimitReport:
    a_values: list
    sup_distances: list
    monotone: bool
    final: float


def pqd_limit(h: RationalFn, a_values, c, n=256) -> LimitReport:
    """Boundary distance between the power-map solutions and the log map.

    Supports monomial data h = alpha k w^(k-1); each power member comes from
    the closed-form family, the limit from the exponential closed form.
    """
    coeffs = h.num_arr
    if not h.is_polynomial():
        raise MissingSolution("limit sweep implemented for monomial data")
    k = len(coeffs)
    alpha = complex(coeffs[-1]) / k
    theta = 2 * np.pi * np.arange(n) / n
    limit_map = monomial_map(alpha, k, c)
    w_limit = limit_map.boundary_values(theta)
    sups = []
    for a in a_values:
        spec, verdict = monomial_family(a, alpha, k, c)
        if verdict == "notAnalytic":
            raise MissingSolution(f"no power solution at a = {a}")
        w_a = spec.boundary_values(theta)
        sups.append(float(np.max(np.abs(w_a - w_limit))))
    monotone = all(sups[i + 1] <= sups[i] + 1e-15 for i in range(len(sups) - 1))
    return LimitReport(list(a_values), sups, monotone, sups[-1])
