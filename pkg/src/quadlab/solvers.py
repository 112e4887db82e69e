"""Shared machinery for the inverse problems.

All inverse problems here reduce to: build a map from a structured ansatz
(unknown preimage points and coefficients), push it through the appropriate
direct problem, and drive the mismatch against the target quadrature function
to zero.  The mismatch is measured at fixed sample points encircling the
target poles, plus explicit preimage constraints, and minimized with a
trust-region least-squares iteration over the packed real parameters.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import least_squares

from .errors import NoConvergence
from .ratfun import RationalFn


def pack(values):
    out = []
    for v in values:
        v = complex(v)
        out.extend((v.real, v.imag))
    return np.asarray(out, dtype=float)


def unpack(x):
    x = np.asarray(x, dtype=float)
    return x[0::2] + 1j * x[1::2]


def h_sample_points(h_target: RationalFn, extra_scale=1.0, n=None):
    """Deterministic sample ring enclosing the poles of the target."""
    poles = [p for p, _ in h_target.poles()]
    deg_hint = len(h_target.num) + len(h_target.den)
    if n is None:
        n = 4 * deg_hint + 8
    if poles:
        center = np.mean(poles)
        rad = max([abs(p - center) for p in poles]) * 2.0 + 1.0
    else:
        center, rad = 0.0, 1.0
    rad *= extra_scale
    return center + rad * np.exp(2j * np.pi * (np.arange(n) + 0.35) / n)


def sampled_mismatch(h_computed: RationalFn, h_target: RationalFn, samples):
    d = h_computed(samples) - h_target(samples)
    return d


def run_least_squares(residual_fn, x0, tol=1e-12, max_nfev=400):
    """least_squares over packed reals; returns (params, residual_norm)."""

    def wrapped(x):
        r = residual_fn(unpack(x))
        return np.concatenate([np.real(r), np.imag(r)])

    res = least_squares(wrapped, pack(x0), method="trf", xtol=3e-16,
                        ftol=3e-16, gtol=3e-16, max_nfev=max_nfev)
    rnorm = float(np.max(np.abs(res.fun))) if len(res.fun) else 0.0
    return unpack(res.x), rnorm


def solve_with_homotopy(make_residual, x0, stages=(1.0,), tol=1e-10,
                        max_nfev=400, label="inverse problem"):
    """Continue the solve through scaled versions of the target.

    ``make_residual(stage)`` returns the residual function for the target
    scaled by ``stage``; the final stage must be 1.0.
    """
    x = x0
    rnorm = np.inf
    for s in stages:
        x, rnorm = run_least_squares(make_residual(s), x, max_nfev=max_nfev)
    if not np.isfinite(rnorm) or rnorm > tol:
        raise NoConvergence(f"{label}: final residual {rnorm:.3e}", residual=rnorm)
    return x, rnorm
