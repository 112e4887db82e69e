"""Univalence and boundary-geometry verdicts.

Boundary injectivity decides univalence (Darboux), so the checker walks the
sampled boundary polygon for self-intersections (GEOS predicates via
shapely), refines suspected crossings with a two-variable Newton iteration,
and cross-checks the verdict by argument-principle counts at a handful of
probes.  Cusps are flagged from zeros of the boundary derivative; for power
and log maps the logarithmic derivative phi'/phi is rational, so those zeros
come from the exact root finder rather than a grid search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import LineString

from .errors import BranchAmbiguity, SampleAliasing
from .maps import EXTERIOR, INTERIOR, MapSpec
from .ratfun import RationalFn, aberth_roots

CUSP_DERIV_TOL = 1e-8
CIRCLE_BAND = 1e-6


@dataclass
class UnivalenceReport:
    verdict: str                      # univalent | selfIntersecting | cusped | notAnalytic
    witnesses: list = field(default_factory=list)
    margin: float = 0.0
    counts_checked: bool = False

    @property
    def univalent(self):
        return self.verdict == "univalent"


def log_derivative(m: MapSpec) -> RationalFn:
    """phi'/phi as a RationalFn (exact for all three kinds)."""
    if m.kind == "rational":
        return m.r.derivative() / m.r
    inner = m.inner_fn
    rs = m.rsharp
    base = inner.derivative() / inner
    if m.kind == "power":
        return base + (1.0 / m.a) * (rs.derivative() / rs)
    return base + rs.derivative()


def boundary_derivative_zeros(m: MapSpec, band=CIRCLE_BAND):
    """Zeros of phi' within ``band`` of the unit circle, Newton-polished."""
    ld = log_derivative(m)
    roots = aberth_roots(ld.num_arr)
    out = []
    for z in roots:
        if abs(abs(z) - 1.0) > 1e-3:
            continue
        # polish on phi' itself with a second-order jet
        zz = complex(z)
        for _ in range(60):
            j = m.eval_jet(zz, 2)
            d1, d2 = j[1], 2.0 * j[2]
            if abs(d2) == 0:
                break
            step = d1 / d2
            zz -= step
            if abs(step) < 1e-15 * (1 + abs(zz)):
                break
        if abs(abs(zz) - 1.0) <= band:
            out.append(zz)
    return out


def analyticity_obstructions(m: MapSpec):
    """Zeros/poles of r^# inside the closed map domain (power maps only)."""
    if m.kind != "power":
        return []
    bad = []
    tol = 1e-9
    for z in aberth_roots(m.rsharp.num_arr):
        if m.in_domain(z, tol=-tol):
            bad.append(("zero", complex(z)))
    for z, _mult in m.rsharp.poles():
        if m.in_domain(z, tol=-tol):
            bad.append(("pole", complex(z)))
    return bad


def _refine_crossing(m: MapSpec, t1, t2):
    """Newton on phi(e^{i t1}) = phi(e^{i t2}) in the two angles."""
    x = np.array([t1, t2], dtype=float)
    for _ in range(60):
        z1, z2 = np.exp(1j * x)
        f = m.eval(np.array([z1]))[0] - m.eval(np.array([z2]))[0]
        d1 = m.eval_derivative(np.array([z1]))[0] * 1j * z1
        d2 = -m.eval_derivative(np.array([z2]))[0] * 1j * z2
        J = np.array([[d1.real, d2.real], [d1.imag, d2.imag]])
        try:
            dx = np.linalg.solve(J, [f.real, f.imag])
        except np.linalg.LinAlgError:
            break
        x = x - dx
        if np.max(np.abs(dx)) < 1e-10:
            break
    return float(x[0]) % (2 * np.pi), float(x[1]) % (2 * np.pi)


def _crossing_candidates(w, theta):
    """Index pairs of non-adjacent segments of the closed polyline that cross."""
    n = len(w)
    pts = np.c_[w.real, w.imag]
    a = pts
    b = np.roll(pts, -1, axis=0)
    # coarse spatial hash on segment bounding boxes
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    span = max(np.max(hi[:, 0]) - np.min(lo[:, 0]),
               np.max(hi[:, 1]) - np.min(lo[:, 1]), 1e-300)
    cell = max(np.max(np.hypot(*(b - a).T)) * 1.5, span / 512)
    grid = {}
    for i in range(n):
        for gx in range(int(lo[i, 0] // cell), int(hi[i, 0] // cell) + 1):
            for gy in range(int(lo[i, 1] // cell), int(hi[i, 1] // cell) + 1):
                grid.setdefault((gx, gy), []).append(i)
    ii_all, jj_all = [], []
    for bucket in grid.values():
        if len(bucket) < 2:
            continue
        arr = np.asarray(bucket)
        ii, jj = np.meshgrid(arr, arr, indexing="ij")
        mask = ii < jj
        ii_all.append(ii[mask])
        jj_all.append(jj[mask])
    if not ii_all:
        return []
    ii = np.concatenate(ii_all)
    jj = np.concatenate(jj_all)
    gap = np.abs(ii - jj)
    keep = (gap > 1) & (gap < n - 1)
    ii, jj = ii[keep], jj[keep]
    if len(ii) == 0:
        return []
    pairs = np.unique(ii * n + jj)
    ii = pairs // n
    jj = pairs % n
    hit = _segments_cross_vec(a[ii], b[ii], a[jj], b[jj])
    return list(zip(ii[hit].tolist(), jj[hit].tolist()))


def _cross2_vec(ux, uy, vx, vy):
    return ux * vy - uy * vx


def _segments_cross_vec(p1, p2, p3, p4):
    e1x, e1y = (p2 - p1)[:, 0], (p2 - p1)[:, 1]
    e2x, e2y = (p4 - p3)[:, 0], (p4 - p3)[:, 1]
    d1 = _cross2_vec(e2x, e2y, (p1 - p3)[:, 0], (p1 - p3)[:, 1])
    d2 = _cross2_vec(e2x, e2y, (p2 - p3)[:, 0], (p2 - p3)[:, 1])
    d3 = _cross2_vec(e1x, e1y, (p3 - p1)[:, 0], (p3 - p1)[:, 1])
    d4 = _cross2_vec(e1x, e1y, (p4 - p1)[:, 0], (p4 - p1)[:, 1])
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def _argument_principle_counts(m: MapSpec, curve, probes):
    """Number of phi-preimages of each probe (must be 0 or 1 if univalent)."""
    ok = True
    for q in probes:
        wind = curve.winding(q)
        count = (1 - wind) if m.orientation == EXTERIOR else wind
        if count not in (0, 1):
            ok = False
    return ok


def univalence_check(m: MapSpec, n=2048) -> UnivalenceReport:
    """Classify the map by boundary injectivity.

    Verdicts: ``notAnalytic`` (power factor has zeros/poles in the closed
    domain), ``selfIntersecting`` (refined boundary crossings, witnesses
    attached as angle pairs), ``cusped`` (boundary derivative vanishes on the
    circle), else ``univalent`` with margin = min |phi'| on the boundary.
    """
    bad = analyticity_obstructions(m)
    if bad:
        return UnivalenceReport("notAnalytic", witnesses=bad, margin=0.0)
    curve = m.boundary_curve(n)
    # non-closure of the branch-tracked boundary marks a winding power factor;
    # corner-touching maps (power base vanishing on the circle) get one
    # resample, matching the boundary sampler
    seam = None
    for offset in (0.0, np.pi / 257.0):
        try:
            closed = m.boundary_values(offset + np.linspace(0.0, 2 * np.pi, 129))
            seam = abs(closed[0] - closed[-1])
            break
        except BranchAmbiguity:
            continue
    if seam is None:
        raise BranchAmbiguity("power base vanishes on every resampled grid")
    scale = float(np.max(np.abs(curve.w)))
    if seam > 1e-8 * (1 + scale):
        return UnivalenceReport("notAnalytic",
                                witnesses=[("branch-seam", seam)], margin=0.0)
    if not is_simple_curve(curve.w):
        corners = corner_detect(m)
        crossings = _crossing_candidates(curve.w, curve.theta)
        witnesses = []
        dth = 2 * np.pi / n
        for i, j in crossings:
            if min(abs(i - j), n - abs(i - j)) <= 2:
                if corners:
                    # pinched corner, not an unresolved crossing
                    return UnivalenceReport("cusped",
                                            witnesses=[t for t, _a in corners],
                                            margin=0.0)
                raise SampleAliasing(
                    "adjacent-segment crossing; raise the sample count")
            if len(witnesses) >= 8:
                break
            t1, t2 = _refine_crossing(m, curve.theta[i] + dth / 2,
                                      curve.theta[j] + dth / 2)
            pair = (min(t1, t2), max(t1, t2))
            if all(abs(pair[0] - p[0]) > 1e-8 or abs(pair[1] - p[1]) > 1e-8
                   for p in witnesses):
                witnesses.append(pair)
        return UnivalenceReport("selfIntersecting", witnesses=witnesses, margin=0.0)
    zeros = boundary_derivative_zeros(m)
    dmin = float(np.min(np.abs(curve.dw_dtheta)))
    if zeros:
        return UnivalenceReport("cusped",
                                witnesses=[float(np.angle(z) % (2 * np.pi))
                                           for z in zeros],
                                margin=0.0)
    probes = _count_probes(curve)
    counts_ok = _argument_principle_counts(m, curve, probes)
    if not counts_ok:
        return UnivalenceReport("selfIntersecting", witnesses=[], margin=0.0)
    rep = UnivalenceReport("univalent", margin=dmin)
    rep.counts_checked = True
    return rep


def _count_probes(curve):
    center = complex(np.mean(curve.w))
    rad = float(np.max(np.abs(curve.w - center)))
    return [center + 0.35 * rad * np.exp(2j * np.pi * k / 5 + 0.7j)
            for k in range(5)]


def is_simple_curve(w) -> bool:
    """Shapely cross-check that the closed polyline is simple."""
    ring = LineString(np.c_[w.real, w.imag][list(range(len(w))) + [0]])
    return bool(ring.is_simple)


def starlike_test(m: MapSpec, center="origin", n=2048) -> float:
    """min over the circle of Re(z phi'/phi); positive means starlike."""
    theta = 2 * np.pi * np.arange(n) / n
    z = np.exp(1j * theta)
    ld = log_derivative(m)
    vals = np.real(z * ld(z))
    i = int(np.argmin(vals))
    # golden refinement around the sampled minimum
    h = 2 * np.pi / n
    f = lambda t: float(np.real(np.exp(1j * t) * ld(np.exp(1j * t))))
    from .maps import _golden_min

    return float(_golden_min(f, theta[i] - h, theta[i] + h))


def cusp_detect(m: MapSpec):
    """(theta, type) for boundary-derivative zeros on the circle.

    Type is "(3,2)" when the second-order expansion coefficient is nonzero.
    Corner points (power-map boundary through the origin) are excluded and
    reported separately by ``corner_detect``.
    """
    out = []
    corners = {round(t, 9) for t, _ in corner_detect(m)}
    for z in boundary_derivative_zeros(m):
        theta = float(np.angle(z) % (2 * np.pi))
        if round(theta, 9) in corners:
            continue
        j = m.eval_jet(complex(z), 2)
        kind = "(3,2)" if abs(2.0 * j[2]) > 1e-3 else "higher-order"
        out.append((theta, kind))
    return sorted(out)


def locate_transition(family, lo, hi, tol=1e-10, n=2048):
    """Bisect the parameter where a family's verdict leaves 'univalent'.

    ``family(t)`` must return a MapSpec.  Returns (t_critical, report_at_t)
    where the report is taken at the refined critical parameter, so families
    that lose injectivity through a boundary-derivative zero get classified
    'cusped' there (the regular-homotopy obstruction: a family cannot pass
    from embedded to self-crossing without a boundary singularity).
    """
    def is_uni(t):
        return univalence_check(family(t), n=n).verdict == "univalent"

    if not is_uni(lo):
        raise ValueError("family must start univalent at lo")
    if is_uni(hi):
        raise ValueError("family must have lost univalence at hi")
    a, b = lo, hi
    while b - a > tol * (1 + abs(b)):
        mid = 0.5 * (a + b)
        if is_uni(mid):
            a = mid
        else:
            b = mid
    # classify at the first non-univalent end so the singularity is in view
    return 0.5 * (a + b), univalence_check(family(b), n=n)


def corner_detect(m: MapSpec):
    """Boundary points where a power map meets the origin (angle pi/a)."""
    if m.kind != "power":
        return []
    out = []
    for z in aberth_roots(m.rsharp.num_arr):
        if abs(abs(z) - 1.0) <= 1e-9:
            out.append((float(np.angle(z) % (2 * np.pi)), np.pi / m.a))
    return sorted(out)
