"""Pure-numpy escape-time kernels (fallback twin of the compiled module)."""

from __future__ import annotations

import numpy as np

BRANCH_POINT = -np.exp(-1.0)
W_TOL = 1e-14


def lambert_w0(z):
    """Principal branch of the Lambert W function, Halley iteration.

    Accepts scalars or arrays; real arguments below -1/e follow the
    continuous-from-above convention of the complex principal branch.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.shape == ()
    z = np.atleast_1d(z).copy()
    w = _w0_seed(z)
    for _ in range(64):
        ew = np.exp(w)
        f = w * ew - z
        bad = np.abs(f) > W_TOL * (1.0 + np.abs(z))
        if not bad.any():
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        # Halley step; fall back to Newton where the denominator degenerates
        step = np.where(np.abs(denom) > 1e-300, f / np.where(denom == 0, 1, denom),
                        f / np.where(np.abs(ew * wp1) > 1e-300, ew * wp1, 1.0))
        w = np.where(bad, w - step, w)
    w = np.where(z == 0, 0.0 + 0.0j, w)
    return complex(w[0]) if scalar else w


def _w0_seed(z):
    w = np.empty_like(z)
    az = np.abs(z)
    near0 = az < 0.2
    nearb = ~near0 & (np.abs(z - BRANCH_POINT) < 0.75)
    mid = ~near0 & ~nearb & (az <= 4.0)
    far = ~near0 & ~nearb & ~mid
    zn = z[near0]
    w[near0] = zn * (1.0 - zn + 1.5 * zn * zn)
    p = np.sqrt(2.0 * (np.e * z[nearb] + 1.0) + 0j)
    w[nearb] = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    # log(1+z) interpolates z (small) and log z (large); good Halley basin
    w[mid] = np.log(1.0 + z[mid])
    zr = z[far]
    L1 = np.log(zr)
    L2 = np.log(L1)
    w[far] = L1 - L2 + L2 / L1
    return w


def on_lambert_cut(z, tol=1e-12):
    z = np.asarray(z, dtype=complex)
    return (np.abs(z.imag) <= tol) & (z.real <= BRANCH_POINT + tol)


def teardrop_psi(w):
    """psi(w) = -1/W(-1/w): the exterior-disk coordinate of the teardrop."""
    return -1.0 / lambert_w0(-1.0 / np.asarray(w, dtype=complex))


def teardrop_sigma(w):
    """Schwarz reflection of the teardrop: sigma(w) = -V e^{-1/V},
    V = W(-1/conj(w))."""
    V = lambert_w0(-1.0 / np.conj(np.asarray(w, dtype=complex)))
    return -V * np.exp(-1.0 / V)


def teardrop_in_closure(w, tol=1e-9):
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, dtype=bool)
    nz = w != 0
    z = teardrop_psi(w[nz])
    phi = z * np.exp(1.0 / z)
    ok = (np.abs(z) >= 1.0 - tol) & (np.abs(phi - w[nz]) <= 1e-8 * (1.0 + np.abs(w[nz])))
    out[nz] = ok
    return out


def _pixel_grid(x0, y0, x1, y1, nx, ny):
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    return xs[None, :] + 1j * ys[:, None]


def teardrop_escape_grid(x0, y0, x1, y1, nx, ny, max_iter):
    """Escape-time data for the teardrop Schwarz reflection.

    Returns (escaped uint8, iterations int32, fault uint8), row-major with
    y increasing along rows.  Escaped pixels record the first iteration at
    which the orbit left the closure of the domain; orbits that hit the
    Lambert branch cut or the origin are marked as faults and treated as
    non-escaping.
    """
    w = _pixel_grid(x0, y0, x1, y1, nx, ny)
    escaped = np.zeros(w.shape, dtype=np.uint8)
    fault = np.zeros(w.shape, dtype=np.uint8)
    iters = np.full(w.shape, max_iter, dtype=np.int32)
    active = np.ones(w.shape, dtype=bool)

    out_now = ~teardrop_in_closure(w)
    escaped[out_now] = 1
    iters[out_now] = 0
    active &= ~out_now

    for t in range(1, max_iter + 1):
        if not active.any():
            break
        wa = w[active]
        bad = on_lambert_cut(-1.0 / np.conj(wa)) | (wa == 0)
        nxt = np.empty_like(wa)
        nxt[~bad] = teardrop_sigma(wa[~bad])
        nxt[bad] = wa[bad]
        idx = np.where(active)
        f_idx = (idx[0][bad], idx[1][bad])
        fault[f_idx] = 1
        active[f_idx] = False
        good = ~bad
        g_idx = (idx[0][good], idx[1][good])
        w[g_idx] = nxt[good]
        out_now = ~teardrop_in_closure(nxt[good])
        e_idx = (g_idx[0][out_now], g_idx[1][out_now])
        escaped[e_idx] = 1
        iters[e_idx] = t
        active[e_idx] = False
    return escaped, iters, fault


def exp_escape_grid(x0, y0, x1, y1, nx, ny, max_iter, escape_radius=50.0):
    """Escape-time data for the anti-holomorphic exponential w -> e^{conj w - 1}."""
    w = _pixel_grid(x0, y0, x1, y1, nx, ny)
    escaped = np.zeros(w.shape, dtype=np.uint8)
    iters = np.full(w.shape, max_iter, dtype=np.int32)
    active = np.ones(w.shape, dtype=bool)
    for t in range(0, max_iter + 1):
        if not active.any():
            break
        out_now = active & (w.real > escape_radius)
        escaped[out_now] = 1
        iters[out_now] = t
        active &= ~out_now
        if t < max_iter:
            wa = w[active]
            w[active] = np.exp(np.conj(wa) - 1.0)
    return escaped, iters
