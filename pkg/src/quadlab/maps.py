"""Unified Riemann-map representation and evaluation.

Three kinds are supported, all normalized per the usual conventions
(interior: phi(0) given, phi'(0) > 0;  exterior: phi(z) = c z + O(1), c > 0):

* rational   phi = r                      (r is the map itself)
* power      phi = pre * inner * (r^#)^(1/a)
* log        phi = pre * inner * exp(r^#)

``inner`` is a product of Blaschke factors (times z for exterior maps), of
unit modulus on the circle.  Fractional powers are evaluated as
exp((1/a) log r^#) with the log branch fixed by continuity along a radial
path from the normalization point; boundary sampling uses sequential
argument unwrapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import ratfun
from .errors import (
    AmbiguousPreimage,
    BranchAmbiguity,
    NewtonDivergence,
    NoPreimage,
    NotRational,
    OutsideDomain,
    QuadlabError,
)
from .jets import Jet, invert_jet, laurent_reversion, ratfn_jet
from .ratfun import RationalFn

RATIONAL, POWER, LOG = "rational", "power", "log"
INTERIOR, EXTERIOR = "interior", "exterior"

DOMAIN_TOL = 1e-12


def blaschke(lam):
    """Blaschke factor b_lam as a RationalFn; b_0(z) = z."""
    lam = complex(lam)
    if lam == 0:
        return RationalFn.identity()
    if abs(abs(lam) - 1.0) < 1e-14:
        raise QuadlabError("Blaschke parameter on the unit circle")
    u = np.conj(lam) / abs(lam)
    return RationalFn((-u * lam, u), (-1.0, np.conj(lam)))


@dataclass(frozen=True)
class InnerFactor:
    has_z_factor: bool = False
    blaschke_params: tuple = ()

    def to_ratfn(self):
        out = RationalFn.identity() if self.has_z_factor else RationalFn.one()
        for lam in self.blaschke_params:
            out = out * blaschke(lam)
        return out


@dataclass(frozen=True)
class MapSpec:
    """Conformal-map specification; immutable and safe to share."""

    kind: str
    orientation: str
    r: RationalFn
    a: float | None = None
    inner: InnerFactor = field(default_factory=InnerFactor)
    prefactor: complex = 1.0 + 0j
    # chosen value of log r^# at the normalization point (branch anchor);
    # None means the principal determination.
    anchor_log: complex | None = None

    def __post_init__(self):
        if self.kind not in (RATIONAL, POWER, LOG):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.orientation not in (INTERIOR, EXTERIOR):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.kind == POWER and (self.a is None or self.a <= 0):
            raise ValueError("power maps need a > 0")
        if self.inner.has_z_factor and self.orientation != EXTERIOR:
            raise ValueError("z inner factor is exterior-only")
        for lam in self.inner.blaschke_params:
            inside = abs(lam) < 1.0
            if self.orientation == INTERIOR and not inside and lam != 0:
                raise ValueError("interior Blaschke parameters must lie in D")
            if self.orientation == EXTERIOR and inside and lam != 0:
                raise ValueError("exterior Blaschke parameters must lie outside D")
        object.__setattr__(self, "_rsharp", self.r.reflect())
        object.__setattr__(self, "_inner_fn", self.inner.to_ratfn())

    # -- constructors -------------------------------------------------------

    @classmethod
    def rational(cls, r, orientation):
        return cls(RATIONAL, orientation, r)

    @classmethod
    def power(cls, r, a, orientation, inner=None, prefactor=1.0, anchor_log=None):
        return cls(POWER, orientation, r, a=float(a),
                   inner=inner or InnerFactor(has_z_factor=(orientation == EXTERIOR)),
                   prefactor=complex(prefactor), anchor_log=anchor_log)

    @classmethod
    def log(cls, r, orientation, inner=None, prefactor=1.0):
        return cls(LOG, orientation, r,
                   inner=inner or InnerFactor(has_z_factor=(orientation == EXTERIOR)),
                   prefactor=complex(prefactor))

    # -- helpers ------------------------------------------------------------

    @property
    def rsharp(self) -> RationalFn:
        return self._rsharp

    @property
    def inner_fn(self) -> RationalFn:
        return self._inner_fn

    def normalization_point(self):
        return np.inf if self.orientation == EXTERIOR else 0.0 + 0j

    def in_domain(self, z, tol=DOMAIN_TOL):
        az = np.abs(np.asarray(z))
        if self.orientation == INTERIOR:
            return az <= 1.0 + tol
        return az >= 1.0 - tol

    def _anchor_log_value(self):
        """log r^# at the normalization point (principal unless overridden)."""
        if self.anchor_log is not None:
            return self.anchor_log
        if self.orientation == EXTERIOR:
            v = self.rsharp_at_infinity()
        else:
            v = self._rsharp(0.0 + 0j)
        if v == 0:
            raise BranchAmbiguity("r^# vanishes at the normalization point")
        return np.log(v)

    def rsharp_at_infinity(self):
        num, den = self._rsharp.num_arr, self._rsharp.den_arr
        dn, dd = len(num) - 1, len(den) - 1
        if dn > dd:
            raise BranchAmbiguity("r^# unbounded at infinity")
        return num[-1] / den[-1] if dn == dd else 0.0 + 0j

    def conformal_radius(self):
        """phi'(infinity) for exterior maps."""
        if self.orientation != EXTERIOR:
            raise QuadlabError("conformal radius is an exterior-map notion")
        return self.laurent_data(2)[0]

    # -- branch-tracked log of r^# -------------------------------------------

    def _log_rsharp_scalar(self, z):
        """Continue log r^# from the normalization point to z along a radius."""
        rs = self._rsharp
        base = self._anchor_log_value()
        z = complex(z)
        az = abs(z)
        if az == 0 and self.orientation == INTERIOR:
            return base
        # radial path parameter: interior goes 0 -> z, exterior infinity -> z
        if self.orientation == INTERIOR:
            ts = np.linspace(0.0, 1.0, 33)[1:]
            path = ts * z
            prev_val = np.exp(base)
            prev_log = base
        else:
            rs_inf = np.exp(base)
            radii = np.geomspace(max(az, 1.0) * 4096.0, az, 33)
            path = radii * (z / az if az > 0 else 1.0)
            prev_val = rs_inf
            prev_log = base
        vals = rs(path)
        for v in np.atleast_1d(vals):
            if abs(v) < 1e-300:
                raise BranchAmbiguity("r^# vanishes along the continuation path")
            dphase = np.angle(v / prev_val)
            prev_log = prev_log + np.log(abs(v) / abs(prev_val)) + 1j * dphase
            prev_val = v
        return prev_log

    def _log_rsharp_circle(self, theta):
        """Branch-continued log r^# on the unit circle samples exp(i theta)."""
        z = np.exp(1j * np.asarray(theta))
        vals = self._rsharp(z)
        if np.any(np.abs(vals) < 1e-12):
            raise BranchAmbiguity("|r^#| < 1e-12 at a boundary sample")
        args = np.unwrap(np.angle(vals))
        # pin the offset at the first sample by radial continuation
        ref = self._log_rsharp_scalar(z[0])
        k = np.round((ref.imag - args[0]) / (2 * np.pi))
        args = args + 2 * np.pi * k
        return np.log(np.abs(vals)) + 1j * args

    # -- evaluation -----------------------------------------------------------

    def eval(self, z):
        """phi(z) for a scalar or array argument (branch-safe, slower path)."""
        z = np.asarray(z, dtype=complex)
        scalar = z.shape == ()
        zf = np.atleast_1d(z)
        if self.kind == RATIONAL:
            out = self.r(zf)
        elif self.kind == LOG:
            out = self.prefactor * self._inner_fn(zf) * np.exp(self._rsharp(zf))
        else:
            logs = np.array([self._log_rsharp_scalar(w) for w in zf])
            out = self.prefactor * self._inner_fn(zf) * np.exp(logs / self.a)
        out = np.atleast_1d(out)
        return complex(out[0]) if scalar else out

    __call__ = eval

    def eval_derivative(self, z):
        """phi'(z), exact (closed-form product/chain rule)."""
        z = np.asarray(z, dtype=complex)
        scalar = z.shape == ()
        zf = np.atleast_1d(z)
        if self.kind == RATIONAL:
            out = self.r.derivative()(zf)
        else:
            # phi'/phi = inner'/inner + (1/a)(r^#)'/r^#   (power)
            #          = inner'/inner + (r^#)'            (log)
            vals = np.atleast_1d(self.eval(zf))
            logd = self._inner_fn.derivative()(zf) / self._inner_fn(zf)
            if self.kind == POWER:
                logd = logd + self._rsharp.derivative()(zf) / (self.a * self._rsharp(zf))
            else:
                logd = logd + self._rsharp.derivative()(zf)
            out = vals * logd
        out = np.atleast_1d(out)
        return complex(out[0]) if scalar else out

    def eval_jet(self, z0, order):
        """Jet of phi at z0: [phi, phi', phi''/2, ...] Taylor coefficients."""
        z0 = complex(z0)
        if self.kind == RATIONAL:
            return ratfn_jet(self.r, z0, order)
        inner_j = ratfn_jet(self._inner_fn, z0, order)
        rs_j = ratfn_jet(self._rsharp, z0, order)
        if self.kind == LOG:
            return inner_j * rs_j.exp() * self.prefactor
        base_log = self._log_rsharp_scalar(z0)
        lg = rs_j.log(base_log=base_log)
        return inner_j * (lg * (1.0 / self.a)).exp() * self.prefactor

    def eval_inverse(self, w, seed=None, tol=1e-12, strict=True):
        """z with phi(z) = w.

        Rational maps: all candidate roots are computed and the unique one in
        the (closed) map domain is returned; with ``strict=False`` the root
        nearest the domain is returned when none lies inside.  Power/log maps:
        damped Newton from ``seed`` (default: asymptotic inverse).
        """
        w = complex(w)
        if self.kind == RATIONAL:
            return self._inverse_rational(w, seed=seed, strict=strict)
        return self._inverse_newton(w, seed=seed, tol=tol)

    def _inverse_rational(self, w, seed=None, strict=True):
        n = self.r.num_arr.copy()
        d = self.r.den_arr.copy()
        m = max(len(n), len(d))
        n = np.concatenate([n, np.zeros(m - len(n), complex)])
        d = np.concatenate([d, np.zeros(m - len(d), complex)])
        roots = ratfun.aberth_roots(n - w * d)
        if len(roots) == 0:
            raise NoPreimage(f"phi(z) = {w} has no finite solution")
        inside = roots[self.in_domain(roots, tol=1e-9)]
        if len(inside) == 1:
            return complex(inside[0])
        if len(inside) > 1:
            if seed is not None:
                return complex(inside[np.argmin(np.abs(inside - seed))])
            raise AmbiguousPreimage(
                f"phi(z) = {w} has {len(inside)} solutions in the domain")
        if strict:
            raise NoPreimage(f"phi(z) = {w} has no solution in the map domain")
        if seed is not None:
            return complex(roots[np.argmin(np.abs(roots - seed))])
        dist = np.abs(np.abs(roots) - 1.0)
        order = np.argsort(dist)
        if len(roots) > 1 and abs(dist[order[0]] - dist[order[1]]) < 1e-9:
            raise AmbiguousPreimage(f"phi(z) = {w}: tied off-domain candidates")
        return complex(roots[order[0]])

    def _inverse_newton(self, w, seed=None, tol=1e-12, max_iter=100):
        if seed is None:
            if self.orientation == EXTERIOR:
                c = self.conformal_radius()
                seed = w / c
                if abs(seed) < 1.2:
                    seed = 1.2 * seed / max(abs(seed), 1e-12)
            else:
                j = self.eval_jet(0.0, 1)
                seed = (w - j[0]) / j[1] if abs(j[1]) > 0 else 0.0
        z = complex(seed)
        res = abs(self.eval(z) - w)
        for _ in range(max_iter):
            if res <= tol * (1.0 + abs(w)):
                return z
            dz = (self.eval(z) - w) / self.eval_derivative(z)
            step = 1.0
            for _ in range(40):
                znew = z - step * dz
                if self.orientation == EXTERIOR and abs(znew) < 1.0:
                    znew = znew / abs(znew) * (2.0 - abs(znew))  # reflect back
                if self.orientation == INTERIOR and abs(znew) > 1.0:
                    znew = znew / abs(znew) * max(2.0 - abs(znew), 1e-3)
                rnew = abs(self.eval(znew) - w)
                if rnew < res:
                    z, res = znew, rnew
                    break
                step *= 0.5
            else:
                raise NewtonDivergence(
                    f"inverse iteration stalled at residual {res:.3e}")
        if res <= 1e-11 * (1.0 + abs(w)):
            return z
        raise NewtonDivergence(f"inverse iteration residual {res:.3e}")

    def inverse_jet(self, w0, order, seed=None):
        """(z0, Jet of psi at w0) with psi = phi^{-1}."""
        z0 = self.eval_inverse(w0, seed=seed, strict=False)
        pj = self.eval_jet(z0, order)
        ij = invert_jet(pj, order)
        c = ij.c.copy()
        c[0] = z0
        return z0, Jet(c)

    # -- boundary -----------------------------------------------------------

    def boundary_curve(self, n):
        return boundary_curve(self, n)

    def boundary_values(self, theta):
        """phi(e^{i theta}) with continuous branch tracking along theta."""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        if self.kind == RATIONAL:
            return self.r(z)
        if self.kind == LOG:
            return self.prefactor * self._inner_fn(z) * np.exp(self._rsharp(z))
        logs = self._log_rsharp_circle(theta)
        return self.prefactor * self._inner_fn(z) * np.exp(logs / self.a)

    def boundary_abs(self, theta):
        """|phi(e^{i theta})| without branch tracking (modulus needs none)."""
        theta = np.asarray(theta, dtype=float)
        z = np.exp(1j * theta)
        if self.kind == RATIONAL:
            return np.abs(self.r(z))
        base = abs(self.prefactor) * np.abs(self._inner_fn(z))
        if self.kind == LOG:
            return base * np.exp(np.real(self._rsharp(z)))
        return base * np.abs(self._rsharp(z)) ** (1.0 / self.a)

    # -- Laurent data ---------------------------------------------------------

    def laurent_data(self, n_terms):
        """[c, f0, f1, ...] with phi(z) = c z + f0 + f1/z + ... (exterior)."""
        if self.orientation != EXTERIOR:
            raise QuadlabError("Laurent data at infinity needs an exterior map")
        if self.kind == RATIONAL:
            if self.r.degree() != 1:
                raise QuadlabError("exterior rational map must grow like c z")
            return self.r.laurent_at_infinity(n_terms)
        # series of u*phi(1/u) at u=0 via jets in u
        order = n_terms - 1
        u0 = Jet.variable(0.0, order)
        # u * inner(1/u):  z factor contributes 1, Blaschke factors are
        # evaluated via their u-form b(1/u)
        if not self.inner.has_z_factor:
            raise QuadlabError("exterior map needs the z inner factor")
        acc = Jet.const(1.0, order)
        for lam in self.inner.blaschke_params:
            b = blaschke(lam)
            acc = acc * _ratfn_u_jet(b, order)
        rs_u = _ratfn_u_jet_direct(self.r.conj_coeffs(), order)
        if self.kind == LOG:
            fac = rs_u.exp()
        else:
            base_log = self._anchor_log_value()
            fac = (rs_u.log(base_log=base_log) * (1.0 / self.a)).exp()
        g = (acc * fac * self.prefactor).c
        return g

    def psi_laurent_data(self, n_terms):
        return laurent_reversion(self.laurent_data(n_terms + 4), n_terms)

    # -- serialization ----------------------------------------------------------

    def to_json_obj(self):
        return {
            "kind": self.kind,
            "a": self.a,
            "orientation": self.orientation,
            "zFactor": self.inner.has_z_factor,
            "blaschke": [[lam.real, lam.imag] for lam in
                         map(complex, self.inner.blaschke_params)],
            "prefactor": [complex(self.prefactor).real, complex(self.prefactor).imag],
            "r": self.r.to_json_obj(),
        }

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        inner = InnerFactor(bool(obj.get("zFactor", False)),
                            tuple(complex(re, im) for re, im in obj.get("blaschke", [])))
        pre = obj.get("prefactor", [1.0, 0.0])
        return cls(obj["kind"], obj["orientation"],
                   RationalFn.from_json_obj(obj["r"]),
                   a=obj.get("a"), inner=inner,
                   prefactor=complex(pre[0], pre[1]))

    @classmethod
    def from_json(cls, s):
        return cls.from_json_obj(json.loads(s))


def _ratfn_u_jet(b: RationalFn, order):
    """Jet in u at 0 of b(1/u) for a RationalFn b (finite at infinity)."""
    num = b.num_arr[::-1]
    den = b.den_arr[::-1]
    dn, dd = len(num) - 1, len(den) - 1
    if dn < dd:
        num = np.concatenate([np.zeros(dd - dn, complex), num])
    elif dd < dn:
        raise QuadlabError("function unbounded at infinity")
    from .ratfun import _taylor_divide
    npad = np.concatenate([num, np.zeros(order + 1, complex)])
    dpad = np.concatenate([den, np.zeros(order + 1, complex)])
    return Jet(_taylor_divide(npad, dpad, order + 1))


def _ratfn_u_jet_direct(rt: RationalFn, order):
    """Jet in u at 0 of rt(u) (rt analytic at 0)."""
    return ratfn_jet(rt, 0.0, order)


@dataclass(frozen=True)
class BoundaryCurve:
    """Equispaced boundary samples w = phi(e^{i theta}).

    ``domain_on_left`` records whether traversal in increasing theta keeps
    the image domain on the left (true for interior maps, false for exterior
    maps, where increasing theta goes counterclockwise around the complement).
    """

    theta: np.ndarray
    w: np.ndarray
    dw_dtheta: np.ndarray
    domain_on_left: bool
    spec: MapSpec

    @property
    def n(self):
        return len(self.theta)

    def reversed(self):
        return BoundaryCurve(self.theta[::-1].copy(), self.w[::-1].copy(),
                             -self.dw_dtheta[::-1].copy(),
                             not self.domain_on_left, self.spec)

    def min_abs(self, refine=True):
        """min |w| over the boundary, optionally golden-section refined."""
        i = int(np.argmin(np.abs(self.w)))
        if not refine:
            return float(np.abs(self.w[i]))
        f = lambda t: float(np.atleast_1d(self.spec.boundary_abs([t]))[0])
        h = self.theta[1] - self.theta[0] if self.n > 1 else 0.1
        return _golden_min(f, self.theta[i] - h, self.theta[i] + h)

    def winding(self, q):
        dw = np.angle(np.roll(self.w - q, -1) / (self.w - q))
        return int(np.round(np.sum(dw) / (2 * np.pi)))

    def contains(self, q):
        """Point enclosed by the curve (interior of the bounded side)."""
        return self.winding(q) != 0


def _golden_min(f, a, b, tol=1e-12, max_iter=200):
    gr = (np.sqrt(5.0) - 1) / 2
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return min(fc, fd)


def boundary_curve(spec: MapSpec, n: int) -> BoundaryCurve:
    """Equispaced boundary samples with continuous branch tracking."""
    if n < 16:
        raise QuadlabError("need at least 16 boundary samples")
    theta = 2 * np.pi * np.arange(n) / n
    try:
        w = spec.boundary_values(theta)
    except BranchAmbiguity:
        theta = theta + np.pi / n  # resample once off the singular angle
        w = spec.boundary_values(theta)
    z = np.exp(1j * theta)
    dw = spec.eval_derivative(z) * 1j * z
    return BoundaryCurve(theta, np.asarray(w), np.asarray(dw),
                         domain_on_left=(spec.orientation == INTERIOR),
                         spec=spec)


def require_rational(spec: MapSpec):
    if spec.kind != RATIONAL:
        raise NotRational(f"operation needs a rational map, got {spec.kind}")
