"""Classical quadrature domains (weight 1).

Direct problem, inverse problem, Schwarz function, change of variables, and
the complete one-point classification with complex charge.  The direct and
inverse problems go through the Faber transform; inverse solving uses the
structured pole ansatz (poles of the map sit at reflected preimages of the
quadrature-function poles) with a least-squares fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conformal, solvers
from .errors import (
    BranchViolation,
    NoConvergence,
    NoRoot,
    NotRational,
    QuadlabError,
)
from .faber import FaberContext, faber_transform
from .maps import EXTERIOR, INTERIOR, MapSpec
from .ratfun import RationalFn, aberth_roots, cauchy_project_circle

CONSERVED_TOL = 1e-7


@dataclass(frozen=True)
class QuadSpec:
    """Weight parameter, quadrature function, boundedness flag."""

    h: RationalFn
    bounded: bool
    a: float = 1.0

    def __post_init__(self):
        if self.bounded and self.h.degree() >= 0 and not self.h.is_zero():
            raise QuadlabError("bounded quadrature functions must vanish at infinity")

    def to_json_obj(self):
        return {"a": self.a, "h": self.h.to_json_obj(), "bounded": self.bounded}

    @classmethod
    def from_json_obj(cls, obj):
        return cls(RationalFn.from_json_obj(obj["h"]), bool(obj["bounded"]),
                   float(obj.get("a", 1.0)))


@dataclass
class InverseSolution:
    """Inverse-problem output: map plus diagnostics."""

    spec: MapSpec
    residual: float
    univalence: conformal.UnivalenceReport | None = None
    warnings: list = field(default_factory=list)

    @property
    def univalent(self):
        return self.univalence is not None and self.univalence.univalent


# ---------------------------------------------------------------------------
# direct problem
# ---------------------------------------------------------------------------

def direct_problem(m: MapSpec, strict=True) -> QuadSpec:
    """Quadrature function of the image domain of a rational map.

    ``strict=False`` lets transform-argument poles sit slightly off their
    nominal side of the circle (smooth continuation used inside solvers).
    """
    if m.kind != "rational":
        raise NotRational("classical direct problem needs a rational map")
    ctx = FaberContext(m)
    if m.orientation == INTERIOR:
        w0 = m.r(0.0)
        arg = m.r.reflect() - np.conj(w0)
        h = faber_transform(ctx, arg, strict=strict)
        return QuadSpec(h, bounded=True)
    arg = cauchy_project_circle(m.r.reflect(), "interior")
    h = faber_transform(ctx, arg, strict=strict)
    return QuadSpec(h, bounded=False)


# ---------------------------------------------------------------------------
# Schwarz function and reflected evaluation
# ---------------------------------------------------------------------------

def reflect_eval(m: MapSpec, z):
    """phi^#(z) = conj(phi(1/conj(z))), evaluated off the map domain."""
    z = np.asarray(z, dtype=complex)
    scalar = z.shape == ()
    zf = np.atleast_1d(z)
    if m.kind == "rational":
        out = m.r.reflect()(zf)
    else:
        out = np.conj(np.atleast_1d(m.eval(1.0 / np.conj(zf))))
    return complex(out[0]) if scalar else out


def schwarz_function(m: MapSpec):
    """Evaluator of S = phi^# o psi (meromorphic continuation of conj(w))."""
    state = {"seed": None}

    def S(w):
        z = m.eval_inverse(w, seed=state["seed"], strict=False)
        state["seed"] = z
        return reflect_eval(m, z)

    return S


# ---------------------------------------------------------------------------
# change of variables
# ---------------------------------------------------------------------------

def change_of_variables(q: QuadSpec, a, b) -> QuadSpec:
    """Quadrature data of a*Omega + b."""
    a = complex(a)
    b = complex(b)
    if a == 0:
        raise QuadlabError("scale factor must be nonzero")
    h = np.conj(a) * q.h.compose_affine(a, b)
    if not q.bounded:
        h = h + np.conj(b)
    return QuadSpec(h, q.bounded, q.a)


# ---------------------------------------------------------------------------
# one-point classification
# ---------------------------------------------------------------------------

@dataclass
class ExistenceReport:
    exists: bool
    boundary_margin: float
    regime: str                       # positiveAlpha | negativeAlpha | complexAlpha | zeroAlpha
    t_star: float | None = None
    c_star: float | None = None


def c_star_negative(alpha, w0):
    """Critical conformal radius for real alpha < 0 (trigonometric middle root)."""
    beta = alpha * (8.0 / (3.0 * w0)) ** 2
    s = (3.0 / 32.0 * beta ** 2 - 3.0 * beta - 1.0) / (1.0 - beta) ** 1.5
    return w0 / 8.0 * (5.0 - 6.0 * np.sqrt(1.0 - beta)
                       * np.sin(np.arcsin(s) / 3.0))


def c_star_cubic_roots(alpha, w0):
    """Real roots of 8c^3 - 15 w0 c^2 + 6(w0^2+4a)c + (w0^2-a)(w0^2+4a)/w0."""
    coeffs = [(w0 ** 2 - alpha) * (w0 ** 2 + 4 * alpha) / w0,
              6.0 * (w0 ** 2 + 4 * alpha), -15.0 * w0, 8.0]
    roots = aberth_roots(coeffs)
    return sorted(float(r.real) for r in roots if abs(r.imag) < 1e-9)


def tc_residual(t, c, alpha, w0, normalized=False):
    """Quartic relation between the droplet area t and conformal radius c.

    The printed form of this relation drops two terms; the version used here
    was re-derived by eliminating the preimage point between the map's
    quartic and t = c^2 - (c z0 - w0)^2/z0^2, and is verified against the
    boundary-integral area oracle in the tests.  ``normalized`` divides by
    the sum of term magnitudes.
    """
    terms = np.array([
        t ** 4,
        (2 * alpha - c ** 2) * t ** 3,
        (alpha ** 2 + 2 * c ** 2 * (3 * w0 ** 2 - alpha)) * t ** 2,
        (c ** 2 * w0 ** 2 * (4 * alpha + w0 ** 2) - 14 * c ** 4 * w0 ** 2) * t,
        8 * c ** 6 * w0 ** 2 - c ** 4 * w0 ** 2 * (4 * alpha + w0 ** 2),
    ])
    val = float(np.sum(terms))
    if normalized:
        return val / max(float(np.sum(np.abs(terms))), 1e-300)
    return val


def classify_one_point(alpha, w0) -> ExistenceReport:
    """Existence and critical data for QD(alpha/(w - w0))."""
    alpha = complex(alpha)
    w0 = complex(w0)
    margin = abs(w0) ** 2 + 2 * alpha.real - 2 * abs(alpha)
    if alpha == 0:
        return ExistenceReport(True, margin, "zeroAlpha")
    if alpha.imag == 0 and alpha.real > 0:
        a = alpha.real
        r = abs(w0)
        return ExistenceReport(True, margin, "positiveAlpha",
                               t_star=r * (r + 2 * np.sqrt(a)))
    if alpha.imag == 0 and alpha.real < 0:
        a = alpha.real
        r = abs(w0)
        exists = margin > 0
        if not exists:
            return ExistenceReport(False, margin, "negativeAlpha")
        cs = c_star_negative(a, r)
        t_star = None
        member = _family_member_at(a, r, cs, prefer_cusp=True)
        if member is not None:
            z0 = member[0]
            t_star = float(cs ** 2 - (cs * z0 - r) ** 2 / z0 ** 2)
        return ExistenceReport(True, margin, "negativeAlpha",
                               t_star=t_star, c_star=float(cs))
    exists = margin > 0 and w0 != 0
    return ExistenceReport(bool(exists), margin, "complexAlpha")


def _quartic_real_roots(alpha, w0, c):
    coeffs = [w0 ** 2, -c * w0, -alpha, -c * w0, c ** 2]
    roots = aberth_roots(coeffs)
    return sorted(r.real for r in roots
                  if abs(r.imag) < 1e-9 and r.real >= 1.0 - 1e-10)


def _build_normalized_map(z0, w0, c):
    """phi(z) = c z (z - z1)/(z - 1/conj(z0)) with phi(z0) = w0."""
    z0 = complex(z0)
    z1 = z0 - (w0 / c) * (abs(z0) ** 2 - 1.0) / abs(z0) ** 2
    q = 1.0 / np.conj(z0)
    num = np.array([0.0, -c * z1, c], dtype=complex)
    den = np.array([-q, 1.0], dtype=complex)
    return MapSpec.rational(RationalFn(num, den), EXTERIOR)


def conserved_quantity_residual(z0, w0, c, alpha):
    z0 = complex(z0)
    return abs(alpha * abs(z0) ** 2
               - (c * z0 * abs(z0) ** 2 - w0) * (c * np.conj(z0) - w0))


def univalence_margin(z0, w0, c):
    """Closed-form criterion in the w0 -> 2 normalized frame."""
    c2 = 2.0 * c / w0
    z0 = complex(z0)
    return abs(abs(c2 * z0) - abs(c2 * z0 - 2.0)) * abs(z0) - 2.0


def _family_member_at(alpha, w0, c, prefer_cusp=False):
    """(z0, map) for the normalized problem (real alpha, w0 > 0)."""
    roots = _quartic_real_roots(alpha, w0, c)
    cands = []
    for z0 in roots:
        if abs(z0 - 1.0) < 1e-12:
            z0 = 1.0 + 1e-14
        m = _build_normalized_map(z0, w0, c)
        if conserved_quantity_residual(z0, w0, c, alpha) > CONSERVED_TOL * (1 + abs(alpha)):
            continue
        phi1 = m.eval(1.0 + 0j)
        if not (abs(phi1.imag) < 1e-7 and phi1.real < w0 - 1e-12):
            continue
        cands.append((z0, m))
    if not cands:
        return None
    if prefer_cusp:
        def dphi1(item):
            return abs(item[1].eval_derivative(1.0 + 0j))
        return min(cands, key=dphi1)
    good = [it for it in cands if univalence_margin(it[0], w0, c) > -1e-9]
    pool = good if good else cands
    pool.sort(key=lambda it: (it[0], -abs(it[0])))
    return pool[0]


def one_point_family(alpha, w0, c, z0_seed=None):
    """Family member of QD(alpha/(w - w0)) at conformal radius c.

    Returns (MapSpec, verdict) where verdict is 'univalent', 'cusped' or
    'selfIntersecting' per the closed-form criterion.  Raises NoRoot past the
    critical radius and BranchViolation if only branch-failing roots exist.
    """
    alpha = complex(alpha)
    w0 = complex(w0)
    if w0 == 0:
        raise QuadlabError("w0 = 0 is the plain disk case")
    r0 = abs(w0)
    tau = w0 / r0
    if alpha.imag == 0:
        member = _family_member_at(alpha.real, r0, c)
        if member is None:
            roots = _quartic_real_roots(alpha.real, r0, c)
            if roots:
                raise BranchViolation(
                    f"roots {roots} fail the branch/round-trip conditions")
            raise NoRoot(f"no admissible preimage at c = {c}")
        z0, m_norm = member
    else:
        z0 = _solve_z0_complex(alpha, r0, c, z0_seed)
        m_norm = _build_normalized_map(z0, r0, c)
    margin = univalence_margin(z0, r0, c)
    if margin > 1e-9:
        verdict = "univalent"
    elif margin > -1e-9:
        verdict = "cusped"
    else:
        verdict = "selfIntersecting"
    spec = _rotate_exterior_map(m_norm, tau)
    return spec, verdict


def _rotate_exterior_map(m: MapSpec, tau):
    """Image rotation w -> tau * w keeping phi'(inf) > 0: tau*phi(z/tau)."""
    if tau == 1.0:
        return m
    r = m.r.compose_affine(tau, 0.0) * tau  # phi(z/tau)*tau
    return MapSpec.rational(r, m.orientation)


def _solve_z0_complex(alpha, w0, c, seed=None):
    from scipy.optimize import fsolve

    if seed is None:
        seed = w0 / c + 0.5
    def F(x):
        z0 = complex(x[0], x[1])
        f = ((c * z0 * abs(z0) ** 2 - w0) * (c * np.conj(z0) - w0)
             / abs(z0) ** 2 - alpha)
        return [f.real, f.imag]

    sol, info, ier, _ = fsolve(F, [np.real(seed), np.imag(seed)],
                               full_output=True, xtol=1e-13)
    z0 = complex(sol[0], sol[1])
    if ier != 1 or abs(z0) <= 1.0:
        raise NoRoot(f"complex-charge preimage solve failed at c = {c}")
    return z0


def one_point_bounded_disk(alpha, w0) -> MapSpec:
    """The constant bounded family member D_sqrt(alpha)(w0) (t > t_*)."""
    if not (complex(alpha).imag == 0 and complex(alpha).real > 0):
        raise QuadlabError("bounded one-point domains need alpha > 0")
    r = RationalFn((complex(w0), np.sqrt(complex(alpha).real)))
    return MapSpec.rational(r, INTERIOR)


def critical_c_numeric(alpha, w0, c_hint=None, tol=1e-10):
    """Largest c at which the one-point family still solves, by bisection."""
    alpha = complex(alpha)
    r0 = abs(complex(w0))

    def solvable(c):
        try:
            _spec, verdict = one_point_family(alpha, w0, c)
        except (NoRoot, BranchViolation):
            return False
        return verdict == "univalent"

    lo = 1e-3 * r0
    if not solvable(lo):
        raise NoRoot("family not solvable even at tiny c")
    hi = c_hint if c_hint is not None else r0 + np.sqrt(abs(alpha)) + 1.0
    while solvable(hi):
        hi *= 1.5
        if hi > 1e6:
            raise QuadlabError("no critical radius found")
    while hi - lo > tol * (1 + hi):
        mid = 0.5 * (lo + hi)
        if solvable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# inverse problem
# ---------------------------------------------------------------------------

def inverse_problem(q: QuadSpec, w0=None, c=None, check_univalence=True,
                    tol=1e-9) -> InverseSolution:
    """Reconstruct the Riemann map from a classical quadrature function."""
    if q.bounded:
        if w0 is None:
            raise QuadlabError("bounded inverse problem needs the base point w0")
        sol = _inverse_bounded(q.h, complex(w0), tol)
    else:
        if c is None:
            raise QuadlabError("unbounded inverse problem needs the conformal radius c")
        sol = _inverse_unbounded(q.h, float(c), tol)
    if check_univalence:
        sol.univalence = conformal.univalence_check(sol.spec)
        if not sol.univalence.univalent:
            sol.warnings.append(f"map is {sol.univalence.verdict}")
    return sol


def _round_trip_residual(spec: MapSpec, h_target: RationalFn, samples):
    try:
        h = direct_problem(spec, strict=False).h
    except QuadlabError:
        return np.full(len(samples), 1e3, dtype=complex)
    return solvers.sampled_mismatch(h, h_target, samples)


def _inverse_bounded(h: RationalFn, w0, tol):
    poles = h.poles()
    free_poles = [(p, m) for p, m in poles if abs(p - w0) > 1e-12]
    fixed = [(0.0 + 0j, m) for p, m in poles if abs(p - w0) <= 1e-12]
    n_free = len(free_poles)
    samples = solvers.h_sample_points(h)

    def build(params):
        a_ks = list(params[:n_free]) + [a for a, _ in fixed]
        mults = [m for _, m in free_poles] + [m for _, m in fixed]
        gs = params[n_free:]
        r = RationalFn((complex(w0),))
        gi = 0
        for a_k, mult in zip(a_ks, mults):
            base = RationalFn((0.0, 1.0), (1.0, -np.conj(a_k)))  # z/(1 - conj(a) z)
            p = RationalFn.one()
            for j in range(mult):
                p = p * base
                r = r + complex(gs[gi]) * p
                gi += 1
        return MapSpec.rational(r, INTERIOR)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for i, (p_k, _m) in enumerate(free_poles):
                out.append(spec.eval(complex(params[i])) - p_k)
            out.extend(_round_trip_residual(spec, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    # disk-matched seeds: Omega ~ D_R(w0) with R^2 = total charge, so the
    # preimages sit near (p_k - w0)/R and the leading coefficients near
    # conj(residue)/R
    residues = {p: cs[0] for p, cs in h.partial_fractions().terms}
    mass = sum(abs(v) for v in residues.values()) or 0.1
    R = float(np.sqrt(mass))
    x0 = []
    for p, _m in free_poles:
        guess = (p - w0) / R
        if abs(guess) > 0.85:
            guess = 0.85 * guess / abs(guess)
        x0.append(guess)
    for p, mult in free_poles + [(w0, m) for _a, m in fixed]:
        g1 = np.conj(residues.get(p, R * R)) / R
        x0.extend([g1] + [0.05] * (mult - 1))

    try:
        params, rnorm = solvers.solve_with_homotopy(
            make_residual, x0, stages=(1.0,), tol=tol,
            label="bounded classical inverse problem")
    except NoConvergence:
        params, rnorm = solvers.solve_with_homotopy(
            make_residual, x0, stages=tuple(np.linspace(0.4, 1.0, 7)), tol=tol,
            max_nfev=800, label="bounded classical inverse problem")
    spec = build(params)
    spec = _normalize_interior_rotation(spec)
    return InverseSolution(spec, rnorm)


def _normalize_interior_rotation(spec: MapSpec) -> MapSpec:
    """Rotate the disk variable so that phi'(0) > 0."""
    d = spec.eval_derivative(0.0 + 0j)
    if abs(d) == 0:
        return spec
    tau = np.conj(d) / abs(d)
    if abs(tau - 1.0) < 1e-14:
        return spec
    # phi(tau * z): |tau| = 1 keeps the disk
    r = spec.r.compose_affine(1.0 / tau, 0.0)
    return MapSpec.rational(r, spec.orientation)


def _inverse_unbounded(h: RationalFn, c, tol):
    pe = h.partial_fractions()
    poles = [(p, len(cs)) for p, cs in pe.terms]
    poly_deg = len(pe.poly) - 1 if np.any(np.abs(pe.poly)) else -1
    # one-point fast path: single simple pole, no polynomial part
    if len(poles) == 1 and poles[0][1] == 1 and poly_deg < 1:
        alpha = pe.terms[0][1][0]
        w0 = pe.terms[0][0]
        const = pe.poly[0] if len(pe.poly) else 0.0
        if abs(const) < 1e-14 and abs(w0) > 0:
            spec, _verdict = one_point_family(alpha, w0, c)
            samples = solvers.h_sample_points(h)
            res = float(np.max(np.abs(_round_trip_residual(spec, h, samples))))
            return InverseSolution(spec, res)
    n_poles = len(poles)
    samples = solvers.h_sample_points(h)

    def build(params):
        qs = params[:n_poles]
        rest = list(params[n_poles:])
        r = RationalFn((0.0, complex(c)))  # c z
        r = r + complex(rest.pop(0))       # e0
        for i in range(max(poly_deg, 0) + (1 if poly_deg >= 1 else 0)):
            pass
        di = []
        if poly_deg >= 1:
            for _ in range(poly_deg):
                di.append(complex(rest.pop(0)))
        for i, d in enumerate(di):
            r = r + d * RationalFn((1.0,), tuple([0.0] * (i + 1) + [1.0]))
        gi = 0
        for (p_k, mult), q_k in zip(poles, qs):
            base = RationalFn((1.0,), (-complex(q_k), 1.0))
            p = RationalFn.one()
            for j in range(mult):
                p = p * base
                r = r + complex(rest[gi]) * p
                gi += 1
        return MapSpec.rational(r, EXTERIOR)

    def make_residual(stage):
        hs = h * stage

        def residual(params):
            spec = build(params)
            out = []
            for (p_k, _m), q_k in zip(poles, params[:n_poles]):
                a_k = 1.0 / np.conj(q_k)
                out.append(spec.eval(a_k) - p_k)
            out.extend(_round_trip_residual(spec, hs, samples))
            return np.asarray(out, dtype=complex)

        return residual

    x0 = []
    for p, _m in poles:
        a_guess = p / c
        if abs(a_guess) < 1.3:
            a_guess = 1.3 * a_guess / max(abs(a_guess), 1e-9)
        x0.append(1.0 / np.conj(a_guess))
    x0.append(0.0)  # e0
    if poly_deg >= 1:
        x0.extend([0.1] * poly_deg)
    for _p, mult in poles:
        x0.extend([0.1] * mult)

    params, rnorm = solvers.solve_with_homotopy(
        make_residual, x0, stages=(0.33, 0.66, 1.0), tol=tol,
        label="unbounded classical inverse problem")
    return InverseSolution(build(params), rnorm)
