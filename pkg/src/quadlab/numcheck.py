"""Independent verification oracle.

Everything here reduces to boundary integrals on the trapezoid rule, which is
spectrally accurate for the analytic periodic integrands produced by our
maps.  Area integrals with weight |w|^(2(a-1)) use Green's theorem with

    mu_a(w) = (1/a) conj(w) |w|^(2(a-1)),   mu_0(w) = log|w|^2 / w,

so that d(mu_a)/d(conj w) recovers the weight.  A 2-D parameter-domain
quadrature exists solely as the oracle's own cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from shapely.geometry import Point, Polygon

from .errors import (
    ImaginaryLeak,
    NonFinite,
    ProbeOnBoundary,
    QuadlabError,
    TestClassViolation,
)
from .jets import ratfn_jet
from .maps import EXTERIOR, INTERIOR, BoundaryCurve, MapSpec
from .ratfun import RationalFn

DEFAULT_NODES = 512


def mu_weight(a):
    """Green antiderivative of the weight |w|^(2(a-1)) in d(conj w)."""
    if a == 0:
        return lambda w: np.log(np.abs(w) ** 2) / w
    return lambda w: np.conj(w) * np.abs(w) ** (2 * (a - 1)) / a


def weight_fn(a):
    if a == 0:
        return lambda w: np.abs(w) ** (-2.0)
    return lambda w: np.abs(w) ** (2 * (a - 1.0))


def contour_integral(curve: BoundaryCurve, g) -> complex:
    """(1/2 pi i) * integral of g(w) dw along the stored orientation."""
    vals = g(curve.w) if callable(g) else np.asarray(g)
    integrand = vals * curve.dw_dtheta
    if not np.all(np.isfinite(integrand)):
        raise NonFinite("non-finite integrand on the boundary")
    return complex(np.mean(integrand) / 1j)


def domain_left_integral(curve: BoundaryCurve, g) -> complex:
    """Contour integral oriented with the image domain on the left."""
    v = contour_integral(curve, g)
    return v if curve.domain_on_left else -v


# ---------------------------------------------------------------------------
# quadrature-identity verification
# ---------------------------------------------------------------------------

@dataclass
class TestFn:
    """Admissible test function: ('monomial', j) or ('cauchy', q)."""

    __test__ = False  # keep pytest's collector away

    kind: str
    param: complex

    def label(self):
        if self.kind == "monomial":
            return f"w^{int(self.param.real)}"
        return f"1/(w-({self.param:.6g}))"

    def values(self, w):
        if self.kind == "monomial":
            return w ** int(self.param.real)
        return 1.0 / (w - self.param)

    def derivative_at(self, p, k):
        """k-th derivative at p."""
        if self.kind == "monomial":
            j = int(self.param.real)
            if k > j >= 0:
                return 0.0 + 0j
            coef = 1.0
            for i in range(k):
                coef *= (j - i)
            return coef * p ** (j - k)
        q = self.param
        return (-1) ** k * _fact(k) / (p - q) ** (k + 1)


def _fact(k):
    out = 1.0
    for i in range(2, k + 1):
        out *= i
    return out


@dataclass
class ResidualReport:
    per_test: list          # (label, lhs, rhs, abs_err, rel_err)
    max_rel: float
    nodes: int
    orientation_used: str

    def passed(self, tol=1e-7):
        return self.max_rel < tol


def curve_polygon(curve: BoundaryCurve) -> Polygon:
    return Polygon(np.c_[curve.w.real, curve.w.imag])


def interior_probes(curve: BoundaryCurve, k=5):
    """Deterministic probe points inside the region enclosed by the curve."""
    poly = curve_polygon(curve)
    diam = max(poly.bounds[2] - poly.bounds[0], poly.bounds[3] - poly.bounds[1])
    out = []
    rep = poly.representative_point()
    if poly.exterior.distance(rep) > 0.02 * diam:
        out.append(complex(rep.x, rep.y))
    cx, cy = poly.centroid.x, poly.centroid.y
    for frac in np.linspace(0.0, 0.75, 24):
        for ang in np.linspace(0.0, 2 * np.pi, 9)[:-1]:
            p = Point(cx + frac * diam / 2 * np.cos(ang),
                      cy + frac * diam / 2 * np.sin(ang))
            if poly.contains(p) and poly.exterior.distance(p) > 0.05 * diam:
                q = complex(p.x, p.y)
                if all(abs(q - o) > 0.02 * diam for o in out):
                    out.append(q)
            if len(out) >= k:
                return out[:k]
    return out[:k]


def exterior_probes(curve: BoundaryCurve, k=5):
    center = np.mean(curve.w)
    rad = np.max(np.abs(curve.w - center))
    return [complex(center + 1.7 * rad * np.exp(2j * np.pi * (i + 0.3) / k))
            for i in range(k)]


def default_tests(curve: BoundaryCurve, bounded: bool, zero_enclosed=None):
    if bounded:
        tests = [TestFn("monomial", j) for j in range(5)]
        tests += [TestFn("cauchy", q) for q in exterior_probes(curve)]
        return tests
    tests = [TestFn("cauchy", q) for q in interior_probes(curve)]
    if zero_enclosed is None:
        zero_enclosed = curve.contains(0.0) and curve.min_abs(refine=False) > 1e-6
    if zero_enclosed:
        tests += [TestFn("monomial", -j) for j in range(1, 6)]
    return tests


def _check_test_class(test: TestFn, bounded: bool):
    j = int(test.param.real) if test.kind == "monomial" else None
    if test.kind == "monomial":
        if bounded and j < 0:
            raise TestClassViolation("negative powers are not analytic in a bounded domain")
        if not bounded and j >= 0:
            raise TestClassViolation(
                "constants/polynomials are not admissible for unbounded domains")


def residue_rhs(test: TestFn, h: RationalFn, bounded: bool) -> complex:
    """Exact right-hand side sum of residues of f*h on the domain side."""
    if bounded:
        out = 0.0 + 0j
        for pole, coeffs in h.partial_fractions().terms:
            for j, c in enumerate(coeffs):
                out += c * test.derivative_at(pole, j) / _fact(j)
        return out
    # unbounded: minus the residues of f*h at the poles of f in the complement
    if test.kind == "cauchy":
        return -complex(h(test.param))
    j = -int(test.param.real)
    hj = ratfn_jet(h, 0.0, j - 1)
    return -complex(hj[j - 1])


def verify_quadrature_identity(m: MapSpec, a, h: RationalFn, tests=None,
                               nodes=DEFAULT_NODES, rhs_consistency=1e-10):
    """Check  integral_Omega f rho_a dA  ==  contour integral of f h dw.

    The right-hand side is computed twice (exact residues and contour
    quadrature) and must self-agree before the comparison is trusted.
    """
    curve = m.boundary_curve(nodes)
    bounded = m.orientation == INTERIOR
    if tests is None:
        tests = default_tests(curve, bounded)
    mu = mu_weight(a)
    per = []
    max_rel = 0.0
    for t in tests:
        _check_test_class(t, bounded)
        fvals = t.values(curve.w)
        lhs = domain_left_integral(curve, fvals * mu(curve.w))
        rhs = residue_rhs(t, h, bounded)
        rhs_quad = domain_left_integral(curve, fvals * h(curve.w))
        if abs(rhs_quad - rhs) > rhs_consistency * (1 + abs(rhs)):
            raise QuadlabError(
                f"residue and quadrature RHS disagree for {t.label()}: "
                f"{rhs} vs {rhs_quad}")
        err = abs(lhs - rhs)
        rel = err / (1.0 + abs(rhs))
        max_rel = max(max_rel, rel)
        per.append((t.label(), lhs, rhs, err, rel))
    orientation = "domain-left" if curve.domain_on_left else "complement-ccw(negated)"
    return ResidualReport(per, max_rel, nodes, orientation)


# ---------------------------------------------------------------------------
# areas and transforms
# ---------------------------------------------------------------------------

def weighted_area(m: MapSpec, a, side="auto", nodes=DEFAULT_NODES,
                  imag_tol=1e-10) -> float:
    """t = integral of |w|^(2(a-1)) dA over the domain (bounded maps) or the
    complement (exterior maps); dA carries the 1/pi normalization."""
    curve = m.boundary_curve(nodes)
    if side == "auto":
        side = "domain" if m.orientation == INTERIOR else "complement"
    if (side == "domain") != (m.orientation == INTERIOR):
        raise QuadlabError(f"side {side!r} is unbounded for this map; "
                           "only the compact side has finite weighted area")
    mu = mu_weight(a)
    # both cases integrate counterclockwise around the compact region, which
    # is the stored theta direction for either orientation
    val = contour_integral(curve, mu(curve.w))
    if abs(val.imag) > imag_tol * (1 + abs(val)):
        raise ImaginaryLeak(f"weighted area has imaginary part {val.imag:.3e}")
    return float(val.real)


def weighted_area_2d(m: MapSpec, a, n_rad=160, n_theta=512) -> float:
    """Secondary oracle: 2-D quadrature over the unit-disk parameter domain."""
    if m.orientation != INTERIOR:
        raise QuadlabError("parameter-domain quadrature implemented for bounded maps")
    x, wts = leggauss(n_rad)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * wts
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    rho = weight_fn(a)
    total = 0.0
    for si, wi in zip(s, ws):
        z = si * np.exp(1j * theta)
        vals = rho(m.eval(z)) * np.abs(m.eval_derivative(z)) ** 2
        total += wi * si * 2.0 * np.mean(vals)
    return float(total)


def cauchy_transform(m: MapSpec, a, w, region="complement",
                     nodes=DEFAULT_NODES) -> complex:
    """Weighted Cauchy transform  integral_U rho_a(xi)/(w - xi) dA(xi).

    U is the bounded region: the domain itself for interior maps
    (region='domain') or the complement of an exterior map's image
    (region='complement').  Probes may lie on either side of the boundary
    but not on it.
    """
    curve = m.boundary_curve(nodes)
    w = complex(w)
    if np.min(np.abs(curve.w - w)) < 1e-6:
        raise ProbeOnBoundary(f"probe {w} is on the boundary")
    if region == "domain" and m.orientation != INTERIOR:
        raise QuadlabError("region='domain' needs a bounded map")
    if region == "complement" and m.orientation != EXTERIOR:
        raise QuadlabError("region='complement' needs an exterior map")
    mu = mu_weight(a)
    # counterclockwise around the compact region = stored direction
    val = contour_integral(curve, mu(curve.w) / (w - curve.w))
    if curve.winding(w) != 0:
        val = val + mu(np.array([w]))[0]
    return complex(val)


# ---------------------------------------------------------------------------
# potential minima
# ---------------------------------------------------------------------------

def potential_minima(alpha, w0, a=1.0):
    """Local minima of the droplet potential.

    Classical one-point case (a=1): closed-form candidates after rescaling
    the node to 2; each candidate is classified by the second-order test
    |alpha| < |w - 2|^2.  Power case with constant quadrature function:
    gradient-descent confirmation of the closed-form stationary point of
    Q = |w|^(2a)/a^2 - 2 Re(alpha w).
    """
    out = []
    if a == 1.0:
        w0 = complex(w0)
        if w0 == 0:
            return [(0.0 + 0j, "minimum" if alpha == 0 else "candidate")]
        scale = w0 / 2.0  # normalized problem has node at 2
        al = complex(alpha) * 4.0 / abs(w0) ** 2
        disc = 4 + 4 * al.real - al.imag ** 2
        if disc < 0:
            return []
        root = np.sqrt(disc)
        for sgn in (-1.0, +1.0):
            wn = 0.5 * (2 + 1j * al.imag + sgn * root)
            is_min = (sgn < 0) and (abs(al) < abs(wn - 2) ** 2)
            out.append((complex(scale * wn), "minimum" if is_min else "saddle"))
        return out
    # power case, constant quadrature function alpha > 0
    alpha = complex(alpha)
    cand = (a * alpha) ** (1.0 / (2 * a - 1.0))
    refined = _descend(lambda w: abs(w) ** (2 * a) / a ** 2 - 2 * (alpha * w).real,
                       complex(cand))
    return [(refined, "minimum")]


def _descend(Q, w, step=1e-3, iters=500):
    from scipy.optimize import minimize

    res = minimize(lambda xy: Q(complex(xy[0], xy[1])),
                   [w.real, w.imag], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return complex(res.x[0], res.x[1])
