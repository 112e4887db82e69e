"""Complex rational-function algebra.

Coefficients are stored as dense ascending-degree complex arrays (degrees in
this problem family stay below ~10, so density costs nothing).  Canonical form
has a monic denominator and no shared numerator/denominator root closer than
``CANCEL_TOL``.  Roots come from an Aberth-Ehrlich simultaneous iteration;
multiple roots are recovered by clustering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    NearMultiplePole,
    PoleOnCircle,
    QuadlabError,
)

CANCEL_TOL = 1e-9      # common-root cancellation distance
CLUSTER_RADIUS = 1e-7  # multiplicity detection
ABERTH_TOL = 1e-13
MAX_DEGREE = 64
CIRCLE_TOL = 1e-9      # pole-on-circle guard for Cauchy projections


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.nonzero(np.abs(c) > 0)[0]
    if len(nz) == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def polyval(c, z):
    """Horner evaluation of an ascending coefficient array."""
    c = np.asarray(c, dtype=complex)
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for ck in c[::-1]:
        out = out * z + ck
    return out


def polyder(c):
    c = np.asarray(c, dtype=complex)
    if len(c) <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, len(c), dtype=complex)


def aberth_roots(coeffs, tol=ABERTH_TOL, max_iter=200):
    """All roots of a polynomial by Aberth-Ehrlich simultaneous iteration.

    ``coeffs`` ascending.  Returns an array of ``deg`` roots (unsorted,
    multiplicities repeated).
    """
    c = _trim(coeffs)
    n = len(c) - 1
    if n > MAX_DEGREE:
        raise QuadlabError(f"polynomial degree {n} exceeds supported maximum {MAX_DEGREE}")
    if n <= 0:
        return np.zeros(0, dtype=complex)
    # factor out exact roots at the origin (structured inputs produce these)
    k0 = 0
    while k0 < n and c[k0] == 0:
        k0 += 1
    if k0:
        rest = aberth_roots(c[k0:], tol=tol, max_iter=max_iter)
        return np.concatenate([np.zeros(k0, dtype=complex), rest])
    c = c / c[-1]
    if n == 1:
        return np.array([-c[0]])
    if n == 2:
        b, a = c[1], c[2]
        disc = np.sqrt(b * b - 4 * a * c[0] + 0j)
        # numerically stable quadratic
        q = -0.5 * (b + disc) if abs(b + disc) >= abs(b - disc) else -0.5 * (b - disc)
        r1 = q / a
        r2 = c[0] / q if q != 0 else 0.0 + 0j
        return np.array([r1, r2])

    # Bini-style initialization: roots spread on a circle sized by the
    # coefficient magnitudes, with an irrational phase offset.
    with np.errstate(divide="ignore"):
        mags = np.abs(c[:-1])
    nzmask = mags > 0
    radius = 1.0
    if nzmask.any():
        k = np.nonzero(nzmask)[0]
        radius = max(np.max((mags[k]) ** (1.0 / (n - k))), 1e-8)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)

    dc = polyder(c)
    for _ in range(max_iter):
        pz = polyval(c, z)
        dz = polyval(dc, z)
        ratio = np.where(dz != 0, pz / np.where(dz == 0, 1, dz), 0.0)
        # Newton correction with Aberth coupling
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - ratio * s
        step = np.where(np.abs(denom) > 1e-300, ratio / denom, ratio)
        z = z - step
        if np.all(np.abs(step) <= tol * (1.0 + np.abs(z))):
            break
    return z


def _cluster_radius(m, scale):
    """Expected Aberth scatter of an m-fold root (eps^(1/m) ball)."""
    if m <= 1:
        return CLUSTER_RADIUS * scale
    return max(CLUSTER_RADIUS, 10.0 * (1e-14) ** (1.0 / m)) * scale


def cluster_roots(roots, radius=CLUSTER_RADIUS, poly=None, strict=False):
    """Cluster near-coincident roots with multiplicity-aware radii.

    An m-fold root scatters over a ball of radius ~eps^(1/m) under
    simultaneous iteration, so candidate multiplicities are tested from
    high to low, accepting m when exactly m unused roots fall inside the
    matching ball.  When the source polynomial is supplied, multiple-root
    centers are polished by Newton on its (m-1)-th derivative, where the
    confluent root is simple.  With ``strict`` set, clusters whose internal
    scatter exceeds the plausible m-fold scatter are rejected as ambiguous
    (distinct poles too close to deflate, yet too separated to be one
    confluent point).
    """
    roots = np.asarray(roots, dtype=complex)
    n = len(roots)
    used = np.zeros(n, dtype=bool)
    clusters = []
    order = np.argsort(np.abs(roots), kind="stable")
    for i in order:
        if used[i]:
            continue
        z = roots[i]
        scale = 1.0 + abs(z)
        dist = np.abs(roots - z)
        mult = 1
        sel = None
        for m in range(min(8, int((~used).sum())), 0, -1):
            ball = (dist <= _cluster_radius(m, scale)) & ~used
            if int(ball.sum()) == m:
                mult, sel = m, ball
                break
        if sel is None:
            sel = np.zeros(n, dtype=bool)
            sel[i] = True
            mult = 1
        used |= sel
        center = roots[sel].mean()
        if mult > 1:
            scatter = float(np.max(np.abs(roots[sel] - center)))
            plausible = 3.0 * max(CLUSTER_RADIUS,
                                  (1e-14) ** (1.0 / mult)) * scale
            if strict and scatter > plausible:
                raise NearMultiplePole(
                    f"root cluster at {center} has scatter {scatter:.2e}: "
                    "too tight to separate, too loose to merge")
            if poly is not None:
                center = _polish_confluent(poly, center, mult)
        clusters.append((center, mult))
    return clusters


def _polish_confluent(poly, center, mult):
    d = np.asarray(poly, dtype=complex)
    for _ in range(mult - 1):
        d = polyder(d)
    dd = polyder(d)
    z = complex(center)
    for _ in range(50):
        fz = complex(polyval(d, z))
        dz = complex(polyval(dd, z))
        if dz == 0:
            break
        step = fz / dz
        z -= step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    window = 10 * _cluster_radius(mult, 1.0 + abs(center))
    return z if abs(z - center) < window else center


@dataclass(frozen=True)
class RationalFn:
    """Rational function num(z)/den(z), ascending coefficients, canonical form."""

    num: tuple
    den: tuple

    # -- construction -----------------------------------------------------

    def __init__(self, num, den=(1.0,), canonicalize=True):
        num = _trim(num)
        den = _trim(den)
        if np.all(den == 0):
            raise QuadlabError("denominator is identically zero")
        if canonicalize:
            num, den = _cancel_common_roots(num, den)
            lead = den[-1]
            num = num / lead
            den = den / lead
        object.__setattr__(self, "num", tuple(num.tolist()))
        object.__setattr__(self, "den", tuple(den.tolist()))

    @classmethod
    def from_poly(cls, coeffs):
        return cls(coeffs, (1.0,))

    @classmethod
    def zero(cls):
        return cls((0.0,), (1.0,))

    @classmethod
    def one(cls):
        return cls((1.0,), (1.0,))

    @classmethod
    def identity(cls):
        """z itself."""
        return cls((0.0, 1.0), (1.0,))

    # -- basic queries -----------------------------------------------------

    @property
    def num_arr(self):
        return np.asarray(self.num, dtype=complex)

    @property
    def den_arr(self):
        return np.asarray(self.den, dtype=complex)

    def is_zero(self, tol=0.0):
        return np.all(np.abs(self.num_arr) <= tol)

    def is_polynomial(self):
        return len(self.den) == 1

    def degree(self):
        """deg num - deg den (order of growth at infinity)."""
        return (len(self.num) - 1) - (len(self.den) - 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = polyval(self.num_arr, z) / polyval(self.den_arr, z)
        return out if out.shape else complex(out)

    def derivative(self):
        n, d = self.num_arr, self.den_arr
        dn = P.polysub(P.polymul(polyder(n), d), P.polymul(n, polyder(d)))
        return RationalFn(dn, P.polymul(d, d))

    def roots(self):
        return aberth_roots(self.num_arr)

    def poles(self):
        """(pole, multiplicity) pairs from the clustered denominator roots."""
        return cluster_roots(aberth_roots(self.den_arr), poly=self.den_arr)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_ratfn(other)
        n = P.polyadd(P.polymul(self.num_arr, other.den_arr),
                      P.polymul(other.num_arr, self.den_arr))
        return RationalFn(n, P.polymul(self.den_arr, other.den_arr))

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num_arr, self.den_arr, canonicalize=False)

    def __sub__(self, other):
        return self + (-_as_ratfn(other))

    def __rsub__(self, other):
        return _as_ratfn(other) + (-self)

    def __mul__(self, other):
        other = _as_ratfn(other)
        return RationalFn(P.polymul(self.num_arr, other.num_arr),
                          P.polymul(self.den_arr, other.den_arr))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_ratfn(other)
        if np.all(np.abs(other.num_arr) == 0):
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(P.polymul(self.num_arr, other.den_arr),
                          P.polymul(self.den_arr, other.num_arr))

    def __rtruediv__(self, other):
        return _as_ratfn(other) / self

    def compose_affine(self, a, b):
        """self((z - b)/a) as a RationalFn."""
        if a == 0:
            raise QuadlabError("affine composition needs a != 0")
        inner = np.array([-b / a, 1.0 / a], dtype=complex)
        return RationalFn(_poly_compose(self.num_arr, inner),
                          _poly_compose(self.den_arr, inner))

    def compose(self, other):
        """self(other(z)) for rational ``other`` (small degrees only)."""
        other = _as_ratfn(other)
        num = _ratpoly_compose(self.num_arr, other)
        den = _ratpoly_compose(self.den_arr, other)
        return num / den

    def reflect(self):
        """g^#(z) = conj(g(1/conj(z))): conjugate coefficients, z -> 1/z."""
        n = np.conj(self.num_arr)[::-1]
        d = np.conj(self.den_arr)[::-1]
        shift = (len(self.den) - 1) - (len(self.num) - 1)
        if shift >= 0:
            n = np.concatenate([np.zeros(shift, dtype=complex), n])
        else:
            d = np.concatenate([np.zeros(-shift, dtype=complex), d])
        return RationalFn(n, d)

    def conj_coeffs(self):
        """Rational function with conjugated coefficients (= reflect o (1/z))."""
        return RationalFn(np.conj(self.num_arr), np.conj(self.den_arr),
                          canonicalize=False)

    # -- decompositions ------------------------------------------------------

    def partial_fractions(self):
        return partial_fractions(self)

    def laurent_at_infinity(self, n_terms):
        """Coefficients of z^k, k = degree ... degree-n_terms+1 (exact)."""
        n, d = self.num_arr, self.den_arr
        deg = self.degree()
        # expand in u = 1/z: f = z^deg * (rev num)(u)/(rev den)(u)
        nu = n[::-1]
        du = d[::-1]
        out = np.zeros(n_terms, dtype=complex)
        # Taylor division nu/du around u=0 (du[0] = monic leading coeff = 1)
        q = np.zeros(n_terms, dtype=complex)
        nu_pad = np.concatenate([nu, np.zeros(max(0, n_terms - len(nu)), dtype=complex)])
        for k in range(n_terms):
            acc = nu_pad[k] if k < len(nu_pad) else 0.0
            for j in range(1, min(k, len(du) - 1) + 1):
                acc -= du[j] * q[k - j]
            q[k] = acc / du[0]
        out[:] = q[:n_terms]
        return out

    def cauchy_project_circle(self, side):
        return cauchy_project_circle(self, side)

    # -- serialization ---------------------------------------------------------

    def to_json_obj(self):
        return {"num": [[z.real, z.imag] for z in self.num],
                "den": [[z.real, z.imag] for z in self.den]}

    def to_json(self):
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj):
        num = [complex(re, im) for re, im in obj["num"]]
        den = [complex(re, im) for re, im in obj.get("den", [[1.0, 0.0]])]
        return cls(num, den)

    @classmethod
    def from_json(cls, s):
        return cls.from_json_obj(json.loads(s))

    def __repr__(self):
        return f"RationalFn(num={list(self.num)}, den={list(self.den)})"


def _as_ratfn(x):
    if isinstance(x, RationalFn):
        return x
    return RationalFn([complex(x)], (1.0,), canonicalize=False)


def _poly_compose(outer, inner):
    """outer(inner(z)) for polynomial coefficient arrays (ascending)."""
    out = np.zeros(1, dtype=complex)
    for ck in np.asarray(outer, dtype=complex)[::-1]:
        out = P.polyadd(P.polymul(out, inner), [ck])
    return out

def _ratpoly_compose(outer, inner):
    """outer(inner) where outer is a poly coeff array and inner a RationalFn."""
    out = RationalFn.zero()
    for ck in np.asarray(outer, dtype=complex)[::-1]:
        out = out * inner + complex(ck)
    return out


def _cancel_common_roots(num, den, tol=CANCEL_TOL):
    num = _trim(num)
    den = _trim(den)
    if len(num) == 1 and num[0] == 0:
        return num, den
    if len(den) == 1:
        return num, den
    # exact common factors of z cancel without touching the root finder
    kn = 0
    while kn < len(num) - 1 and num[kn] == 0:
        kn += 1
    kd = 0
    while kd < len(den) - 1 and den[kd] == 0:
        kd += 1
    k = min(kn, kd)
    if k:
        num = num[k:]
        den = den[k:]
        if len(den) == 1:
            return num, den
    den_roots = aberth_roots(den)
    num_roots = aberth_roots(num)
    keep_den = list(den_roots)
    keep_num = list(num_roots)
    changed = False
    i = 0
    while i < len(keep_den):
        p = keep_den[i]
        js = [j for j, q in enumerate(keep_num) if abs(q - p) <= tol * (1.0 + abs(p))]
        if js:
            keep_num.pop(js[0])
            keep_den.pop(i)
            changed = True
        else:
            i += 1
    if not changed:
        return num, den
    lead_num = num[-1]
    new_num = lead_num * P.polyfromroots(keep_num) if keep_num else np.array([lead_num])
    new_den = den[-1] * P.polyfromroots(keep_den) if keep_den else np.array([den[-1]])
    return _trim(new_num), _trim(new_den)


@dataclass(frozen=True)
class PoleExpansion:
    """poly(z) + sum over poles of sum_j coeffs[j] (z - pole)^-(j+1)."""

    poly: tuple
    terms: tuple  # of (pole, coeffs-tuple)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = polyval(np.asarray(self.poly, dtype=complex), z)
        for pole, coeffs in self.terms:
            invz = 1.0 / (z - pole)
            acc = np.zeros_like(z)
            for c in reversed(coeffs):
                acc = (acc + c) * invz
            out = out + acc
        return out if out.shape else complex(out)

    def principal_part(self):
        """The pole terms alone as a RationalFn (vanishes at infinity)."""
        out = RationalFn.zero()
        for pole, coeffs in self.terms:
            base = RationalFn((1.0,), (-pole, 1.0))
            powk = RationalFn.one()
            for c in coeffs:
                powk = powk * base
                out = out + complex(c) * powk
        return out

    def to_ratfn(self):
        return RationalFn.from_poly(self.poly) + self.principal_part()


def partial_fractions(f: RationalFn) -> PoleExpansion:
    """Polynomial part + principal parts at clustered poles.

    NearMultiplePole is raised when a cluster is too tight to separate yet
    too loose to merge confidently.
    """
    n, d = f.num_arr, f.den_arr
    if len(d) == 1:
        return PoleExpansion(tuple((n / d[0]).tolist()), ())
    q, _ = P.polydiv(n, d)
    poly = _trim(q)
    clusters = cluster_roots(aberth_roots(d), poly=d, strict=True)
    # guard: distinct clusters separated by less than ~10x the merge radius
    for i, (p, mp) in enumerate(clusters):
        for pq, mq in clusters[i + 1:]:
            guard = 10 * _cluster_radius(max(mp, mq), 1 + abs(p))
            if abs(p - pq) < guard:
                raise NearMultiplePole(
                    f"poles {p} and {pq} too close to separate reliably")
    terms = []
    for pole, mult in clusters:
        # deflate the denominator by (z - pole)^mult
        dd = d.copy()
        for _ in range(mult):
            dd = _deflate(dd, pole)
        # Taylor coefficients of num/dd around the pole give the principal part:
        # f = g(z)/(z-p)^m with g = num/dd analytic at p
        gnum = _taylor_shift(n, pole, mult)
        gden = _taylor_shift(dd, pole, mult)
        gj = _taylor_divide(gnum, gden, mult)
        coeffs = tuple(gj[mult - 1 - j] for j in range(mult))
        terms.append((complex(pole), tuple(complex(c) for c in coeffs)))
    return PoleExpansion(tuple(complex(c) for c in poly), tuple(terms))


def _taylor_shift(c, z0, nterms):
    """First ``nterms`` Taylor coefficients of poly c about z0 (Horner shift)."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(nterms, dtype=complex)
    work = c.copy()
    for k in range(nterms):
        # evaluate and synthetic-divide by (z - z0)
        b = np.zeros_like(work)
        acc = 0.0 + 0j
        for i in range(len(work) - 1, -1, -1):
            acc = acc * z0 + work[i]
            b[i] = acc
        out[k] = b[0]
        work = b[1:] if len(b) > 1 else np.zeros(1, dtype=complex)
        if len(work) == 0:
            break
    return out


def _taylor_divide(a, b, nterms):
    """Taylor coefficients of a(z)/b(z) about 0 given coefficient arrays."""
    if abs(b[0]) == 0:
        raise QuadlabError("division by series with zero constant term")
    q = np.zeros(nterms, dtype=complex)
    for k in range(nterms):
        acc = a[k] if k < len(a) else 0.0
        for j in range(1, min(k, len(b) - 1) + 1):
            acc -= b[j] * q[k - j]
        q[k] = acc / b[0]
    return q


def _deflate(c, root):
    """Synthetic division of poly c by (z - root); remainder discarded."""
    c = np.asarray(c, dtype=complex)
    out = np.zeros(len(c) - 1, dtype=complex)
    acc = 0.0 + 0j
    for i in range(len(c) - 1, 0, -1):
        acc = acc * root + c[i]
        out[i - 1] = acc
    return out


def cauchy_project_circle(f: RationalFn, side: str) -> RationalFn:
    """Cauchy projection onto A(D) (``interior``) or A0(D^c) (``exterior``).

    interior part keeps the polynomial piece and all principal parts with
    poles outside the closed disk; the exterior part keeps principal parts
    with poles inside and vanishes at infinity.  interior + exterior == f.
    """
    if side not in ("interior", "exterior"):
        raise ValueError("side must be 'interior' or 'exterior'")
    pe = partial_fractions(f)
    for pole, _ in pe.terms:
        if abs(abs(pole) - 1.0) < CIRCLE_TOL:
            raise PoleOnCircle(f"pole at {pole} lies on the unit circle")
    inside = [t for t in pe.terms if abs(t[0]) < 1.0]
    outside = [t for t in pe.terms if abs(t[0]) > 1.0]
    if side == "exterior":
        return PoleExpansion((0.0,), tuple(inside)).principal_part()
    return PoleExpansion(pe.poly, tuple(outside)).to_ratfn()
