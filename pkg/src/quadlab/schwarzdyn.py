"""Schwarz-reflection dynamics: escape-time partitions and rendering.

The reflection sigma = conj about the Schwarz function fixes the boundary
pointwise; iterating it splits the closure of the domain into the tiling set
(orbits that reach the fundamental tile, the complement of the domain) and
the non-escaping set.  The teardrop domain z e^{1/z} has the closed form

    sigma(w) = -V exp(-1/V),   V = W(-1/conj(w))

with W the principal Lambert branch; pixels whose orbits hit the branch cut
are flagged rather than silently continued.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .classical import reflect_eval
from .errors import LambertBranchCut
from .maps import EXTERIOR, MapSpec
from .ratfun import RationalFn

lambert_w0 = _kernels.lambert_w0


def teardrop_map() -> MapSpec:
    """phi(z) = z e^{1/z} as a MapSpec (unit-charge monomial log map)."""
    r = RationalFn((0.0, 1.0))       # r(z) = z  =>  r^#(z) = 1/z
    return MapSpec.log(r, EXTERIOR, prefactor=1.0)


def schwarz_reflect(m: MapSpec, w):
    """sigma(w) = conj(S(w)) = conj(phi^# o psi (w)).

    Rational maps go through the exact reflected-map path; the teardrop uses
    the Lambert closed form.
    """
    w = np.asarray(w, dtype=complex)
    scalar = w.shape == ()
    wf = np.atleast_1d(w)
    if _is_teardrop(m):
        if np.any(_kernels.python_impl.on_lambert_cut(-1.0 / np.conj(wf))):
            raise LambertBranchCut("argument maps onto the Lambert branch cut")
        out = _kernels.python_impl.teardrop_sigma(wf)
    else:
        out = np.empty_like(wf)
        for i, ww in enumerate(wf):
            z = m.eval_inverse(ww, strict=False)
            out[i] = np.conj(reflect_eval(m, z))
    return complex(out[0]) if scalar else out


def _is_teardrop(m: MapSpec):
    return (m.kind == "log" and m.orientation == EXTERIOR
            and abs(m.prefactor - 1.0) < 1e-14
            and m.r.num == (0.0 + 0j, 1.0 + 0j) and m.r.den == (1.0 + 0j,))


@dataclass
class EscapeGrid:
    """Per-pixel escape-time data over a rectangle (row-major, y up rows)."""

    x0: float
    y0: float
    x1: float
    y1: float
    escaped: np.ndarray     # uint8 [ny, nx]
    iterations: np.ndarray  # int32 [ny, nx]
    fault: np.ndarray       # uint8 [ny, nx]
    max_iter: int

    @property
    def resolution(self):
        ny, nx = self.escaped.shape
        return nx, ny

    def escape_fraction(self):
        return float(np.mean(self.escaped))

    def to_ppm(self, path):
        write_ppm(path, render_rgb(self))

    def to_png(self, path):
        from PIL import Image

        Image.fromarray(render_rgb(self)[::-1], mode="RGB").save(path)


def escape_grid(m: MapSpec, region, resolution, max_iter=100) -> EscapeGrid:
    """Iterate the Schwarz reflection over a pixel grid.

    ``region`` is (x0, y0, x1, y1); pixels outside the closure escape at
    iteration 0 (they already sit in the tile).  Currently the teardrop is
    the supported transcendental fixture; exterior-disk and other rational
    maps go through a generic numpy loop.
    """
    x0, y0, x1, y1 = map(float, region)
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    if _is_teardrop(m):
        esc, iters, fault = _kernels.teardrop_escape_grid(
            x0, y0, x1, y1, int(nx), int(ny), int(max_iter))
        return EscapeGrid(x0, y0, x1, y1, esc, iters, fault, int(max_iter))
    return _generic_escape_grid(m, x0, y0, x1, y1, int(nx), int(ny), int(max_iter))


def _generic_escape_grid(m, x0, y0, x1, y1, nx, ny, max_iter):
    if m.kind != "rational":
        raise NotImplementedError("generic escape grids support rational maps")
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    w = xs[None, :] + 1j * ys[:, None]
    escaped = np.zeros(w.shape, dtype=np.uint8)
    fault = np.zeros(w.shape, dtype=np.uint8)
    iters = np.full(w.shape, max_iter, dtype=np.int32)
    sharp = m.r.reflect()
    curve = m.boundary_curve(1024)

    def in_closure(vals):
        out = np.zeros(vals.shape, dtype=bool)
        for idx, val in np.ndenumerate(vals):
            wind = curve.winding(val)
            inside_compact = wind != 0
            out[idx] = (not inside_compact) if m.orientation == EXTERIOR \
                else inside_compact
        return out

    active = in_closure(w)
    escaped[~active] = 1
    iters[~active] = 0
    for t in range(1, max_iter + 1):
        if not active.any():
            break
        idx = np.where(active)
        vals = w[idx]
        nxt = np.empty_like(vals)
        for k, ww in enumerate(vals):
            try:
                z = m.eval_inverse(ww, strict=False)
                nxt[k] = np.conj(sharp(z))
            except Exception:
                nxt[k] = np.nan
        bad = ~np.isfinite(nxt)
        fault[(idx[0][bad], idx[1][bad])] = 1
        active[(idx[0][bad], idx[1][bad])] = False
        good = ~bad
        g_idx = (idx[0][good], idx[1][good])
        w[g_idx] = nxt[good]
        still_in = in_closure(nxt[good])
        e_idx = (g_idx[0][~still_in], g_idx[1][~still_in])
        escaped[e_idx] = 1
        iters[e_idx] = t
        active[e_idx] = False
    return EscapeGrid(x0, y0, x1, y1, escaped, iters, fault, max_iter)


def antiholo_exp_julia(region, resolution, max_iter=100,
                       escape_radius=50.0) -> EscapeGrid:
    """Escape grid of the anti-holomorphic exponential w -> e^{conj(w) - 1}."""
    if escape_radius < 50.0:
        raise ValueError("escape_radius must be at least 50")
    x0, y0, x1, y1 = map(float, region)
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    esc, iters = _kernels.exp_escape_grid(x0, y0, x1, y1, int(nx), int(ny),
                                          int(max_iter), float(escape_radius))
    fault = np.zeros_like(esc)
    return EscapeGrid(x0, y0, x1, y1, esc, iters, fault, int(max_iter))


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_rgb(grid: EscapeGrid) -> np.ndarray:
    """Simple escape-time coloring: non-escaping black, faults red."""
    it = grid.iterations.astype(float)
    mx = max(float(it.max()), 1.0)
    shade = (0.25 + 0.75 * (it / mx) ** 0.5) * 255.0
    rgb = np.zeros(grid.escaped.shape + (3,), dtype=np.uint8)
    esc = grid.escaped.astype(bool)
    rgb[esc, 0] = (0.4 * shade[esc]).astype(np.uint8)
    rgb[esc, 1] = (0.6 * shade[esc]).astype(np.uint8)
    rgb[esc, 2] = shade[esc].astype(np.uint8)
    flt = grid.fault.astype(bool)
    rgb[flt] = (200, 30, 30)
    return rgb


def write_ppm(path, rgb: np.ndarray):
    """Binary P6 export (rows flipped so y points up in the image)."""
    ny, nx, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{nx} {ny}\n255\n".encode())
        fh.write(rgb[::-1].tobytes())
