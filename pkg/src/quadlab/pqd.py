"""Power-weighted quadrature domains (weight |w|^(2(a-1))).

Product-representation form: every simply connected power-weighted QD has a
Riemann map phi = phi_in * (r^#)^(1/a) with rational r.  The direct problem
is pure residue algebra; the weighted-area constant t is double-entry
bookkeeping: cancellation of the spurious 1/w pole on one side, boundary
quadrature on the other, and the two must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conformal, numcheck, solvers
from .errors import (
    InconsistentT,
    NoConvergence,
    NotApplicable,
    NotSymmetric,
    NoRoot,
    QuadlabError,
)
from .faber import FaberContext, faber_polynomial, faber_transform
from .maps import EXTERIOR, INTERIOR, InnerFactor, MapSpec
from .ratfun import RationalFn, cauchy_project_circle

T_AGREE_TOL = 1e-6


@dataclass(frozen=True)
class PQDProblem:
    a: float
    h: RationalFn
    bounded: bool
    contains_zero: bool = False
    contains_infinity: bool = False

    def __post_init__(self):
        if self.a <= 0:
            raise QuadlabError("power weight needs a > 0")
        if self.bounded and self.contains_infinity:
            raise QuadlabError("bounded domains cannot contain infinity")
        if self.bounded and self.h.degree() >= 0 and not self.h.is_zero():
            raise QuadlabError("bounded quadrature functions vanish at infinity")

    def to_json_obj(self):
        return {"a": self.a, "h": self.h.to_json_obj(), "bounded": self.bounded,
                "containsZero": self.contains_zero,
                "containsInfinity": self.contains_infinity}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(float(obj["a"]), RationalFn.from_json_obj(obj["h"]),
                   bool(obj["bounded"]), bool(obj.get("containsZero", False)),
                   bool(obj.get("containsInfinity", not obj["bounded"])))


@dataclass
class PQDSolution:
    spec: MapSpec
    residual: float
    univalence: conformal.UnivalenceReport | None = None
    warnings: list = field(default_factory=list)


def _denoise(c, rel=5e-14):
    c = np.asarray(c, dtype=complex).copy()
    scale = np.max(np.abs(c))
    if scale > 0:
        c[np.abs(c) < rel * scale] = 0.0
    return c


def _divide_out_w(g: RationalFn, g0, tol=1e-9):
    """(g - g0)/w with exact cancellation of the zero at the origin."""
    d = g - complex(g0)
    num = _denoise(d.num_arr)
    scale = max(np.max(np.abs(num)), 1e-300)
    if abs(num[0]) > tol * scale:
        raise QuadlabError(f"no cancellation at 0 (residual {abs(num[0]):.2e})")
    return RationalFn(num[1:] if len(num) > 1 else (0.0,), _denoise(d.den_arr))


def direct_problem_power(m: MapSpec, verify_t="auto", nodes=512):
    """Quadrature function of a power-map image.

    verify_t: 'auto' reconciles the pole-cancellation value of the weighted
    area against boundary quadrature when the boundary is usable; True forces
    the reconciliation; False skips it (used inside solver loops and for
    formal post-critical solutions).
    """
    if m.kind != "power":
        raise QuadlabError("direct_problem_power needs a power map")
    a = m.a
    ctx = FaberContext(m)
    rr = m.r * m.rsharp
    contains_zero = bool(m.inner.blaschke_params)
    if m.orientation == INTERIOR:
        part = cauchy_project_circle(rr, "exterior")
        F = faber_transform(ctx, part)
        if not contains_zero:
            h = _divide_out_w(F, F(0.0)) * (1.0 / a)
            t_cancel = -complex(F(0.0)).real / a
            _reconcile_t(m, a, t_cancel, verify_t, nodes)
            return h
        t = numcheck.weighted_area(m, a, nodes=nodes)
        return _shift_and_divide_aw(F, a * t, a)
    part = cauchy_project_circle(rr, "interior")
    F = faber_transform(ctx, part)
    if not contains_zero:
        h = _divide_out_w(F, F(0.0)) * (1.0 / a)
        t_cancel = complex(F(0.0)).real / a
        _reconcile_t(m, a, t_cancel, verify_t, nodes)
        return h
    t = numcheck.weighted_area(m, a, nodes=nodes)
    return _shift_and_divide_aw(F, -a * t, a)


def _shift_and_divide_aw(F: RationalFn, shift, a):
    """(F + shift)/(a w), denoised so a vanishing 1/w residue cancels."""
    g = F + complex(shift)
    g = RationalFn(_denoise(g.num_arr), _denoise(g.den_arr))
    return g * RationalFn((1.0,), (0.0, a))


def _reconcile_t(m, a, t_cancel, verify_t, nodes):
    if verify_t is False:
        return
    try:
        t_quad = numcheck.weighted_area(m, a, nodes=nodes)
    except QuadlabError as exc:
        if verify_t == "auto":
            return
        raise InconsistentT(
            f"weighted-area quadrature failed ({exc}); "
            "non-univalent map or branch fault") from exc
    if abs(t_quad - t_cancel) > T_AGREE_TOL * (1.0 + abs(t_cancel)):
        raise InconsistentT(
            f"weighted area mismatch: cancellation {t_cancel:.9g} vs "
            f"quadrature {t_quad:.9g} (non-univalent map or branch fault?)")


# ---------------------------------------------------------------------------
# basic monomial families
# ---------------------------------------------------------------------------

def monomial_gamma(a, alpha, k, c):
    """gamma_k = -a conj(alpha) k / c^(2a-k)."""
    return -a * np.conj(complex(alpha)) * k / c ** (2 * a - k)


def monomial_critical_radius(a, alpha):
    """Critical conformal radius (|alpha|(1-a))^(1/(2a-1)) for a < 1/2, k=1."""
    if not (0 < a < 0.5):
        raise QuadlabError("closed-form critical radius needs 0 < a < 1/2")
    return (abs(complex(alpha)) * (1.0 - a)) ** (1.0 / (2 * a - 1.0))


def monomial_univalence_margin(a, k, gamma, n=4096):
    """Trichotomy margin: root containment for k <= 2a, else the sampled
    minimum of a + Re(k gamma / (z^k - gamma)) over the circle."""
    gamma = complex(gamma)
    root_margin = 1.0 - abs(gamma) ** (1.0 / k) if gamma != 0 else 1.0
    if k <= 2 * a:
        return root_margin
    if root_margin < 0:
        return root_margin
    theta = 2 * np.pi * np.arange(n) / n
    u = np.exp(1j * k * theta)
    vals = a + np.real(k * gamma / (u - gamma))
    i = int(np.argmin(vals))
    from .maps import _golden_min

    f = lambda t: float(a + np.real(k * gamma / (np.exp(1j * k * t) - gamma)))
    h = 2 * np.pi / n
    return float(_golden_min(f, theta[i] - h, theta[i] + h))


def monomial_family(a, alpha, k, c, contains_zero=False):
    """Map and univalence verdict for QD_a(alpha k w^(k-1)).

    Without zero: phi(z) = c z (1 - gamma_k / z^k)^(1/a).  Containing zero is
    only consistent for k = 1 (the preimage of 0 would otherwise break the
    rotational symmetry), where the map picks up a Blaschke factor.
    """
    a = float(a)
    alpha = complex(alpha)
    if not contains_zero:
        g = monomial_gamma(a, alpha, k, c)
        # r^#(z) = c^a (1 - g/z^k);  r = reflect = c^a (1 - conj(g) z^k)
        r = RationalFn(np.concatenate([[c ** a], np.zeros(k - 1, complex),
                                       [-c ** a * np.conj(g)]]))
        spec = MapSpec.power(r, a, EXTERIOR)
        margin = monomial_univalence_margin(a, k, g)
        verdict = "univalent" if margin > 1e-12 else (
            "cusped" if margin > -1e-12 else
            "notAnalytic" if abs(g) > 1 else "selfIntersecting")
        return spec, verdict
    if k != 1:
        raise NotApplicable(
            "containing zero breaks Z_k symmetry for k > 1: the root lift "
            "acquires branch points inside the domain")
    g = monomial_gamma(a, alpha, 1, c)
    if abs(g) < 1.0:
        raise NotApplicable("|gamma| >= 1 is required for 0 in Omega")
    z0 = abs(g) ** (1.0 / (2 * a - 1.0)) * np.exp(1j * np.angle(g))
    izb = 1.0 / np.conj(z0)
    # phi = c z (z - z0)/(z - 1/conj(z0)) * (|c z0|^a (1 - (1/conj(z0))/z))^(1/a)
    # and z (z - z0)/(z - 1/conj(z0)) = |z0| z b_{z0}(z), so the prefactor is 1.
    scale = abs(c * z0) ** a
    r = RationalFn((scale, -scale * np.conj(izb)))   # reflect of scale(1 - izb/z)
    spec = MapSpec.power(r, a, EXTERIOR,
                         inner=InnerFactor(True, (complex(z0),)))
    return spec, "univalent"


# ---------------------------------------------------------------------------
# polynomial families
# ---------------------------------------------------------------------------

def linear_family(a, alpha0, c):
    """phi for QD_a(alpha0 + w), no zero, via the closed coefficient forms.

    Of the two printings of c1 the one validated by the round-trip oracle is
    c1 = (a/c) ((a-2) conj(alpha0) - c^(2(a-1)) alpha0) / ((a-2)^2 - c^(4(a-1))).
    """
    a = float(a)
    alpha0 = complex(alpha0)
    denom = (a - 2.0) ** 2 - c ** (4 * (a - 1.0))
    if abs(denom) < 1e-14:
        raise NoRoot("degenerate linear-family denominator")
    c1 = (a / c) * ((a - 2.0) * np.conj(alpha0) - c ** (2 * (a - 1.0)) * alpha0) / denom
    c2 = a / c ** (2 * (a - 1.0))
    r = RationalFn(np.array([1.0, c1, c2], dtype=complex) * c ** a)
    return MapSpec.power(r, a, EXTERIOR)


def quadratic_family(alpha0, alpha1, c, residual_tol=1e-7):
    """All a=2 maps for QD_2(alpha0 + alpha1 w + w^2) at conformal radius c.

    Roots of the quartic in c1 are filtered by round-trip residual first,
    then univalence, then boundary-touching-origin classification.  Returns
    a list of (MapSpec, verdict, touches_origin, c1) surviving the first
    filter; ``quadratic_quartic_roots`` exposes the unfiltered roots.
    """
    a = 2.0
    alpha0 = complex(alpha0)
    alpha1 = complex(alpha1)
    roots = quadratic_quartic_roots(alpha0, alpha1, c)
    target = RationalFn((alpha0, alpha1, 1.0))
    samples = solvers.h_sample_points(target)
    out = []
    for c1 in roots:
        c2 = 2 * alpha1 / c ** 2 + np.conj(c1) / c
        c3 = 2.0 / c
        r = RationalFn(np.array([1.0, c1, c2, c3], dtype=complex) * c ** a)
        spec = MapSpec.power(r, a, EXTERIOR)
        try:
            h = direct_problem_power(spec, verify_t=False)
        except QuadlabError:
            continue
        res = float(np.max(np.abs(solvers.sampled_mismatch(h, target, samples))))
        if res > residual_tol:
            continue
        uni = conformal.univalence_check(spec)
        touches = False
        if uni.univalent or uni.verdict == "cusped":
            curve = spec.boundary_curve(1024)
            touches = curve.min_abs() < 1e-6
        out.append((spec, uni.verdict, touches, complex(c1)))
    return out


def quadratic_quartic_roots(alpha0, alpha1, c):
    """The four c1 roots of the a=2 quadratic-family quartic."""
    from .ratfun import aberth_roots

    alpha0 = complex(alpha0)
    alpha1 = complex(alpha1)
    s = alpha1 + np.conj(alpha0)
    quartic = [64 * s ** 2 - 128 * (c ** 2 - 1) ** 2 * (np.conj(alpha1) + alpha0),
               64 * c * (c ** 2 - 1) ** 3,
               -16 * c ** 2 * s,
               0.0,
               c ** 4]
    return aberth_roots(quartic)


def polynomial_family(a, coeffs, c):
    """Maps for polynomial quadrature functions (closed paths for deg <= 2)."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    deg = len(coeffs) - 1
    if deg == 0:
        spec, verdict = monomial_family(a, coeffs[0], 1, c)
        return [(spec, verdict, False)]
    if deg == 1:
        if abs(coeffs[1] - 1.0) > 1e-14:
            raise QuadlabError("normalize the linear coefficient to 1 first "
                               "(weighted change of variables)")
        spec = linear_family(a, coeffs[0], c)
        verdict = conformal.univalence_check(spec).verdict
        return [(spec, verdict, False)]
    if deg == 2 and a == 2.0:
        if abs(coeffs[2] - 1.0) > 1e-14:
            raise QuadlabError("normalize the quadratic coefficient to 1 first")
        out = quadratic_family(coeffs[0], coeffs[1], c)
        if not out:
            raise NoRoot("no quartic root survives the round-trip filter")
        return out
    raise NotApplicable("closed polynomial paths cover deg <= 2 (deg 2 at a = 2); "
                        "use inverse_problem_power for the rest")


# ---------------------------------------------------------------------------
# one-point families
# ---------------------------------------------------------------------------

def one_point_alpha_relation(a, c, z0, w0):
    """alpha as a function of the preimage point (unbounded, no zero)."""
    beta = w0 / (c * z0)
    ba = beta ** a
    return (c ** (2 * a) / a ** 2 * (1 - np.conj(beta) ** a)
            * (abs(z0) ** 2 * (1 + ba * (a - 1)) - a * ba))


def one_point_map_nozero(a, c, z0, w0):
    """Map of the unbounded no-zero one-point family at preimage z0."""
    beta = w0 / (c * z0)
    ba = beta ** a
    zb = np.conj(z0)
    # r^#(z) = c^a [z zb - 1 + (|z0|^2 - 1)(beta^a - 1)] / (z zb - 1)
    konst = (abs(z0) ** 2 - 1.0) * (ba - 1.0)
    rsharp = RationalFn((c ** a * (konst - 1.0), c ** a * zb), (-1.0, zb))
    r = rsharp.reflect()
    side = abs(1.0 - konst) - abs(z0)
    spec = MapSpec.power(r, a, EXTERIOR)
    return spec, side


def one_point_power(a, alpha, w0, c=None, contains_zero=False, bounded=False,
                    z0_seed=None):
    """One-point power-weighted QDs, QD_a(alpha/(w - w0)).

    Bounded integer-a cases dispatch to closed forms; the unbounded no-zero
    case solves the alpha relation for the preimage point.  Returns
    (MapSpec, diagnostics dict).
    """
    a = float(a)
    alpha = complex(alpha)
    w0 = complex(w0)
    if bounded:
        return _one_point_bounded(a, alpha, w0)
    if c is None:
        raise QuadlabError("unbounded one-point families need the conformal radius")
    if contains_zero:
        return _one_point_unbounded_zero(a, alpha, w0, c)
    if alpha.imag == 0 and w0.imag == 0 and z0_seed is None:
        z0 = _one_point_root_scan(a, alpha.real, w0.real, c)
    else:
        z0 = _one_point_root_newton(a, alpha, w0, c, z0_seed)
    spec, side = one_point_map_nozero(a, c, z0, w0)
    rel_res = abs(one_point_alpha_relation(a, c, z0, w0) - alpha)
    diags = {"z0": z0, "alpha_residual": rel_res, "side_condition": side,
             "analytic": side < 0}
    return spec, diags


def _one_point_root_scan(a, alpha, w0, c, z_max=None):
    """Real-symmetric case: bracket every real root of the alpha relation and
    keep the one whose map is analytic (power base zero inside the disk,
    i.e. |1 - (|z0|^2-1)(beta^a-1)| < |z0|) and actually sends z0 to w0."""
    from scipy.optimize import brentq

    if z_max is None:
        z_max = max(50.0, 4.0 * abs(w0) / c + 10.0)

    def g(z):
        return one_point_alpha_relation(a, c, z, w0).real - alpha

    cands = []
    for lo, hi in ((1.0 + 1e-9, z_max), (-z_max, -1.0 - 1e-9)):
        zs = np.linspace(lo, hi, 40000)
        vals = np.array([g(z) for z in zs])
        ok = np.isfinite(vals)
        idx = np.where(ok[:-1] & ok[1:] & (np.sign(vals[:-1]) != np.sign(vals[1:])))[0]
        for i in idx:
            z0 = brentq(g, zs[i], zs[i + 1], xtol=1e-15)
            spec, side = one_point_map_nozero(a, c, z0, w0)
            pe = direct_problem_power(spec, verify_t=False).partial_fractions()
            if not pe.terms or abs(pe.terms[0][0] - w0) > 1e-6 * (1 + abs(w0)):
                continue
            cands.append((z0, side))
    if not cands:
        raise NoRoot(f"no admissible preimage at c = {c}")
    valid = [zc for zc in cands if zc[1] < 0]
    pool = valid if valid else cands
    return min(pool, key=lambda zc: abs(zc[0]))[0]


def _one_point_root_newton(a, alpha, w0, c, seed):
    from scipy.optimize import fsolve

    if seed is None:
        seed = w0 / c + 0.4

    def F(x):
        z0 = complex(x[0], x[1])
        f = one_point_alpha_relation(a, c, z0, w0) - alpha
        return [f.real, f.imag]

    sol, _info, ier, _msg = fsolve(F, [np.real(seed), np.imag(seed)],
                                   full_output=True, xtol=1e-13)
    z0 = complex(sol[0], sol[1])
    if ier != 1 or abs(z0) <= 1.0:
        raise NoRoot(f"one-point preimage solve failed at c = {c}")
    return z0


def _one_point_bounded(a, alpha, w0):
    if abs(a - round(a)) > 1e-12:
        raise NotApplicable("bounded one-point closed forms need integer a")
    n = int(round(a))
    if alpha.imag != 0 or alpha.real <= 0:
        raise NotApplicable("bounded one-point families need alpha > 0")
    al = alpha.real
    if w0 == 0:
        r = RationalFn((0.0, (al * n) ** (1.0 / (2 * n))))
        return MapSpec.rational(r, INTERIOR), {"case": "disk"}
    if abs(w0) ** (2 * n) >= n ** 2 * al:
        tau = np.conj(w0 ** (n - 1))
        tau = tau / abs(tau) if abs(tau) > 0 else 1.0
        rsharp = RationalFn((w0 ** n, n * np.sqrt(al) * tau))
        r = rsharp.reflect()
        anchor = n * np.log(w0)
        spec = MapSpec.power(r, float(n), INTERIOR, inner=InnerFactor(),
                             anchor_log=anchor)
        return spec, {"case": "nth-root-of-disk"}
    # 0 < |w0|^{2n} < n^2 alpha: phi = delta z (1 - z conj(m))^{-1/n}
    from scipy.optimize import brentq

    r0 = abs(w0)
    target = al * n / r0 ** (2 * n)

    def g(s):
        return s ** (-n) * (1.0 - s * (n - 1.0) / n) - target

    s = brentq(g, 1e-12, 1.0 - 1e-12, xtol=1e-15)
    z0 = np.sqrt(s)
    delta = r0 / z0 * (1.0 - s) ** (1.0 / n)
    tau = w0 / r0
    mpar = tau * z0
    # phi_out^n = delta^n/(1 - conj(m) z): r = (phi_out^n)^# = delta^n z/(z - m)
    r = RationalFn((0.0, delta ** n), (-mpar, 1.0))
    spec = MapSpec.power(r, float(n), INTERIOR,
                         inner=InnerFactor(False, (0.0 + 0j,)),
                         anchor_log=n * np.log(delta))
    univalent = abs(z0) < 1.0
    return spec, {"case": "blaschke", "z0": complex(mpar), "delta": delta,
                  "univalent": univalent}


def _one_point_unbounded_zero(a, alpha, w0, c, nodes=256):
    """Unbounded, 0 in Omega: solve (z0, z1) against the one-point target."""
    from scipy.optimize import least_squares

    def build(x):
        z0 = complex(x[0], x[1])
        z1 = complex(x[2], x[3])
        beta = (w0 / (c * z0)) * (z0 - 1.0 / np.conj(z1)) / (z0 - z1)
        konst = (abs(z0) ** 2 - 1.0) * (beta ** a - 1.0)
        zb = np.conj(z0)
        scale = abs(c * z1) ** a
        rsharp = RationalFn((scale * (konst - 1.0), scale * zb), (-1.0, zb))
        # c z |z1| b_{z1} (.)^{1/a} with the |c z1| factor inside r^# again
        # makes the prefactor exactly 1
        return MapSpec.power(rsharp.reflect(), a, EXTERIOR,
                             inner=InnerFactor(True, (z1,)))

    def residual(x):
        spec = build(x)
        try:
            h = direct_problem_power(spec, verify_t=True, nodes=nodes)
        except QuadlabError as exc:
            return [1e3, 1e3, 1e3, 1e3]
        # h must be exactly alpha/(w - w0)
        d = h - RationalFn((alpha,), (-w0, 1.0))
        pts = np.array([w0 + 1.3, w0 + 1.1j])
        vals = d(pts)
        return [vals[0].real, vals[0].imag, vals[1].real, vals[1].imag]

    x0 = [np.real(w0 / c) + 0.5, np.imag(w0 / c), 1.4, 0.05]
    res = least_squares(residual, x0, xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if not res.success or np.max(np.abs(res.fun)) > 1e-8:
        raise NoConvergence("one-point (0 in Omega) solve failed",
                            residual=float(np.max(np.abs(res.fun))))
    spec = build(res.x)
    return spec, {"z0": complex(res.x[0], res.x[1]),
                  "z1": complex(res.x[2], res.x[3]),
                  "residual": float(np.max(np.abs(res.fun)))}


# ---------------------------------------------------------------------------
# Z_k reduction
# ---------------------------------------------------------------------------

def check_zk_symmetry(m: MapSpec, k, n=64, tol=1e-9):
    theta = 2 * np.pi * np.arange(n) / n
    w = m.boundary_values(theta)
    w_rot = m.boundary_values(theta + 2 * np.pi / k)
    err = np.max(np.abs(w_rot - np.exp(2j * np.pi / k) * w))
    return float(err) <= tol * (1 + float(np.max(np.abs(w))))


def zk_reduce_problem(p: PQDProblem, k: int) -> PQDProblem:
    """QD_a(alpha k w^(k-1)) -> QD_{a/k}(alpha k^2) for monomial h."""
    if k == 1:
        return p
    coeffs = p.h.num_arr
    if not p.h.is_polynomial() or len(coeffs) != k or \
            np.any(np.abs(coeffs[:-1]) > 1e-14 * max(1.0, abs(coeffs[-1]))):
        raise NotSymmetric("reduction needs h = alpha k w^(k-1)")
    alpha = complex(coeffs[-1]) / k
    return PQDProblem(p.a / k, RationalFn((alpha * k * k,)), p.bounded,
                      p.contains_zero, p.contains_infinity)


def zk_reduce_map(m: MapSpec, k: int) -> MapSpec:
    """Omega -> Omega^k on the map level: phi_u(u) = phi(u^(1/k))^k."""
    if k == 1:
        return m
    if not check_zk_symmetry(m, k):
        raise NotSymmetric(f"map is not Z_{k}-rotationally symmetric")
    if m.kind != "power" or m.inner.blaschke_params:
        raise NotApplicable("reduction implemented for no-zero power maps")
    # r^#(z) must be a rational function of z^k
    rs = m.rsharp
    R_in_u = _decimate_rational(rs, k)
    r_u = R_in_u.reflect()
    return MapSpec.power(r_u, m.a / k, m.orientation,
                         prefactor=m.prefactor ** k)


def zk_lift_map(m_u: MapSpec, k: int, a: float) -> MapSpec:
    """Inverse of zk_reduce_map: phi(z) = z (r_u^#(z^k))^(1/a)."""
    if k == 1:
        return m_u
    rs_u = m_u.rsharp
    rs = rs_u.compose(RationalFn((0.0,) * k + (1.0,)))
    return MapSpec.power(rs.reflect(), a, m_u.orientation,
                         prefactor=m_u.prefactor ** (1.0 / k))


def _decimate_rational(f: RationalFn, k: int) -> RationalFn:
    """Write f(z) = F(z^k); raises NotSymmetric if impossible."""

    def dec(c):
        c = np.asarray(c, complex)
        pad = (-len(c)) % k if len(c) % k else 0
        c = np.concatenate([c, np.zeros(pad, complex)])
        mat = c.reshape(-1, k)
        if np.any(np.abs(mat[:, 1:]) > 1e-12 * max(1.0, np.max(np.abs(c)))):
            raise NotSymmetric("coefficients are not supported on powers of z^k")
        return mat[:, 0]

    return RationalFn(dec(f.num_arr), dec(f.den_arr))


# ---------------------------------------------------------------------------
# inverse problem
# ---------------------------------------------------------------------------

def inverse_problem_power(p: PQDProblem, w0=None, c=None, tol=1e-8,
                          check_univalence=True) -> PQDSolution:
    """Reconstruct the power map from its quadrature function.

    The ansatz takes r with poles at the disk-side preimages of the poles of
    h; the normalization constant is pinned by the base point (bounded) or
    the conformal radius (unbounded); remaining coefficients are solved by
    least squares on the direct-problem round trip.  For integer a the
    Mittag-Leffler sum form is available as a cross-check
    (``mittag_leffler_check``).
    """
    a = p.a
    h = p.h
    if p.contains_zero:
        sol = _inverse_dispatch_zero(p, w0=w0, c=c)
    elif p.bounded:
        if w0 is None:
            raise QuadlabError("bounded inverse problem needs w0")
        sol = _inverse_power_bounded(a, h, complex(w0), tol)
    else:
        if c is None:
            raise QuadlabError("unbounded inverse problem needs c")
        sol = _inverse_power_unbounded(a, h, float(c), tol)
    if check_univalence:
        sol.univalence = conformal.univalence_check(sol.spec)
        if not sol.univalence.univalent:
            sol.warnings.append(f"map is {sol.univalence.verdict}")
    return sol


def _inverse_dispatch_zero(p, w0=None, c=None):
    coeffs = p.h.num_arr
    if p.h.is_polynomial() and len(coeffs) == 1 and not p.bounded:
        spec, _verdict = monomial_family(p.a, coeffs[0], 1, c, contains_zero=True)
        return PQDSolution(spec, 0.0)
    raise NotApplicable("generic 0-in-Omega inverse solving is limited to the "
                        "monomial closed form; use one_point_power for "
                        "one-point data")


def _inverse_power_bounded(a, h, w0, tol):
    pe = h.partial_fractions()
    if np.any(np.abs(np.asarray(pe.poly))):
        raise QuadlabError("bounded quadrature functions have no polynomial part")
    at_w0 = [(pp, cs) for pp, cs in pe.terms if abs(pp - w0) <= 1e-12]
    free = [(pp, cs) for pp, cs in pe.terms if abs(pp - w0) > 1e-12]
    C = np.conj(w0 ** a)
    samples = solvers.h_sample_points(h)
    n_free = len(free)
    d_inv = len(at_w0[0][1]) if at_w0 else 0  # z^-1 p^# block of this depth

    def build(params):
        zs = params[:n_free]
        rest = list(params[n_free:])
        r = RationalFn((C,))
        for i in range(d_inv):
            r = r + complex(rest.pop(0)) * RationalFn((1.0,), (0.0,) * (i + 1) + (1.0,))
        for (pp, cs), z_k in zip(free, zs):
            base = RationalFn((1.0,), (-complex(z_k), 1.0))
            powk = RationalFn.one()
            for _j in range(len(cs)):
                powk = powk * base
                r = r + complex(rest.pop(0)) * powk
        anchor = a * np.log(w0)
        return MapSpec.power(r, a, INTERIOR, inner=InnerFactor(),
                             anchor_log=anchor)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for (pp, _cs), z_k in zip(free, params[:n_free]):
                out.append(spec.eval(complex(z_k)) - pp)
            try:
                hc = direct_problem_power(spec, verify_t=False)
            except QuadlabError:
                return np.full(len(free) + len(samples), 1e3, dtype=complex)
            out.extend(solvers.sampled_mismatch(hc, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    x0 = []
    for pp, _cs in free:
        g = (pp - w0) / (abs(w0) + 1.0)
        x0.append(0.5 * g / max(abs(g), 1.0))
    x0.extend([0.4 + 0.0j] * d_inv)
    for _pp, cs in free:
        x0.extend([0.3] * len(cs))
    params, rnorm = solvers.solve_with_homotopy(
        make_residual, x0, stages=(0.4, 0.7, 1.0), tol=tol,
        label="bounded power inverse problem")
    return PQDSolution(_fix_interior_rotation(build(params)), rnorm)


def _fix_interior_rotation(spec: MapSpec) -> MapSpec:
    """Rotate the disk variable so phi'(0) > 0 (gauge left loose by LM)."""
    if spec.inner.blaschke_params:
        return spec
    d = spec.eval_derivative(0.0 + 0j)
    if abs(d) == 0 or abs(np.angle(d)) < 1e-15:
        return spec
    rot = np.exp(-1j * np.angle(d))
    rs = spec.rsharp.compose_affine(np.conj(rot), 0.0)   # r^#(rot * z)
    if spec.kind == "power":
        return MapSpec.power(rs.reflect(), spec.a, spec.orientation,
                             inner=spec.inner, prefactor=spec.prefactor,
                             anchor_log=spec.anchor_log)
    return MapSpec.log(rs.reflect(), spec.orientation, inner=spec.inner,
                       prefactor=spec.prefactor)


def _inverse_power_unbounded(a, h, c, tol):
    pe = h.partial_fractions()
    poly = np.asarray(pe.poly, dtype=complex)
    poly_deg = len(poly) - 1 if np.any(np.abs(poly)) else -1
    poles = [(pp, len(cs)) for pp, cs in pe.terms]
    C = c ** a
    samples = solvers.h_sample_points(h)
    n_poles = len(poles)

    def build(params):
        zs = params[:n_poles]
        rest = list(params[n_poles:])
        r = RationalFn((C,))
        for i in range(poly_deg + 1):
            # z * p(z) block: monomials z^(i+1)
            r = r + complex(rest.pop(0)) * RationalFn((0.0,) * (i + 1) + (1.0,))
        for (pp, mult), z_k in zip(poles, zs):
            base = RationalFn((1.0,), (-complex(z_k), 1.0))
            powk = RationalFn.identity()
            for _j in range(mult):
                powk = powk * base
                r = r + complex(rest.pop(0)) * powk
        return MapSpec.power(r, a, EXTERIOR)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for (pp, _mult), z_k in zip(poles, params[:n_poles]):
                out.append(spec.eval(complex(z_k)) - pp)
            try:
                hc = direct_problem_power(spec, verify_t=False)
            except QuadlabError:
                return np.full(n_poles + len(samples), 1e3, dtype=complex)
            out.extend(solvers.sampled_mismatch(hc, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    x0 = []
    for pp, _mult in poles:
        g = pp / c
        if abs(g) < 1.3:
            g = 1.3 * g / max(abs(g), 1e-9)
        x0.append(g)
    x0.extend([0.1 + 0.0j] * (poly_deg + 1))
    for _pp, mult in poles:
        x0.extend([0.2] * mult)
    params, rnorm = solvers.solve_with_homotopy(
        make_residual, x0, stages=(0.4, 0.7, 1.0), tol=tol,
        label="unbounded power inverse problem")
    return PQDSolution(build(params), rnorm)


def mittag_leffler_check(m: MapSpec, n_check=None):
    """Integer-a cross-check: the polynomial part of phi^a equals W_a up to
    the constant term (the sum-form representation).  Returns the max
    coefficient deviation on degrees 1..a."""
    a = m.a
    if abs(a - round(a)) > 1e-12:
        raise NotApplicable("Mittag-Leffler form needs integer a")
    n = int(round(a))
    ctx = FaberContext(m)
    Wa = faber_polynomial(ctx, n, which="inverse")
    # phi^a is rational: inner^a * r^#
    phia = m.inner_fn
    acc = RationalFn.one()
    for _ in range(n):
        acc = acc * phia
    phia = acc * m.rsharp * (m.prefactor ** n)
    part = cauchy_project_circle(phia, "interior")
    pa = np.zeros(n + 1, dtype=complex)
    arr = part.num_arr if part.is_polynomial() else None
    if arr is None:
        pe = part.partial_fractions()
        arr = np.asarray(pe.poly, dtype=complex)
    la = np.zeros(n + 1, dtype=complex)
    la[: len(arr)] = arr[: n + 1]
    wa = np.zeros(n + 1, dtype=complex)
    wac = Wa.num_arr
    wa[: len(wac)] = wac[: n + 1]
    return float(np.max(np.abs(la[1:] - wa[1:])))
