"""Truncated complex Taylor jets and exterior Laurent series.

A ``Jet`` holds Taylor coefficients ``f(z0), f'(z0), f''(z0)/2!, ...`` of an
analytic function about a fixed point; arithmetic implements the usual series
calculus (products, quotients, exp, log, powers, functional inversion).  The
Laurent helpers handle expansions ``c z + f0 + f1/z + ...`` about infinity and
their compositional reversion (Lagrange-style, computed by fixed point).
"""

from __future__ import annotations

import numpy as np

from .errors import QuadlabError


class Jet:
    """Taylor coefficients [a0, a1, ..., an] of f about a fixed base point."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=complex)

    @classmethod
    def variable(cls, value, order):
        """Jet of (z - z0) + value, i.e. the identity chart at the base point."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def const(cls, value, order):
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return len(self.c) - 1

    def __getitem__(self, k):
        return self.c[k] if k <= self.order else 0.0 + 0j

    def _match(self, other):
        if not isinstance(other, Jet):
            other = Jet.const(complex(other), self.order)
        n = min(self.order, other.order)
        return self.c[: n + 1], other.c[: n + 1]

    def __add__(self, other):
        a, b = self._match(other)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        a, b = self._match(other)
        return Jet(a - b)

    def __rsub__(self, other):
        a, b = self._match(other)
        return Jet(b - a)

    def __mul__(self, other):
        a, b = self._match(other)
        n = len(a)
        out = np.zeros(n, dtype=complex)
        for k in range(n):
            out[k] = np.dot(a[: k + 1], b[k::-1])
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._match(other)
        if abs(b[0]) == 0:
            raise QuadlabError("jet division by series with zero constant term")
        n = len(a)
        q = np.zeros(n, dtype=complex)
        for k in range(n):
            acc = a[k]
            for j in range(1, k + 1):
                acc -= b[j] * q[k - j]
            q[k] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return Jet.const(complex(other), self.order) / self

    def exp(self):
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        out[0] = np.exp(self.c[0])
        for k in range(1, n):
            acc = 0.0 + 0j
            for j in range(1, k + 1):
                acc += j * self.c[j] * out[k - j]
            out[k] = acc / k
        return Jet(out)

    def log(self, base_log=None):
        """Series of log f; ``base_log`` fixes the branch of log f(z0)."""
        if abs(self.c[0]) == 0:
            raise QuadlabError("log of a jet vanishing at the base point")
        n = self.order + 1
        out = np.zeros(n, dtype=complex)
        out[0] = np.log(self.c[0]) if base_log is None else base_log
        for k in range(1, n):
            acc = k * self.c[k]
            for j in range(1, k):
                acc -= j * out[j] * self.c[k - j]
            out[k] = acc / (k * self.c[0])
        return Jet(out)

    def pow(self, expo, base_value=None):
        """f**expo with the branch pinned by ``base_value`` = f(z0)**expo."""
        lg = self.log()
        out = (lg * expo).exp()
        if base_value is not None:
            out = out * (base_value / out.c[0])
        return Jet(out.c)

    def shift_base_scale(self, scale):
        """Jet of g(t) = f(scale * t): rescales the local chart."""
        powers = scale ** np.arange(self.order + 1)
        return Jet(self.c * powers)

    def derivative_values(self):
        """[f(z0), f'(z0), f''(z0), ...] from the Taylor coefficients."""
        facts = np.cumprod(np.concatenate([[1.0], np.arange(1, self.order + 1)]))
        return self.c * facts

    def truncate(self, order):
        return Jet(self.c[: order + 1])


def ratfn_jet(f, z0, order):
    """Jet of a RationalFn at z0 (must not be a pole)."""
    from .ratfun import _taylor_shift, _taylor_divide

    n = _taylor_shift(f.num_arr, z0, order + 1)
    d = _taylor_shift(f.den_arr, z0, order + 1)
    if abs(d[0]) == 0:
        raise QuadlabError(f"jet base point {z0} is a pole")
    return Jet(_taylor_divide(n, d, order + 1))


def invert_jet(phi_jet, order=None):
    """Jet of the local inverse: given f(z0+t) = w0 + a1 t + ..., a1 != 0,
    returns the jet of f^{-1}(w0+s) = z0 + b1 s + ... (constant term zero,
    caller adds z0)."""
    if order is None:
        order = phi_jet.order
    a = phi_jet.c
    if abs(a[1]) == 0:
        raise QuadlabError("cannot invert a jet with vanishing derivative")
    b = np.zeros(order + 1, dtype=complex)
    b[1] = 1.0 / a[1]
    # fixed point: b_k determined by [s^k] of sum_j a_j * (B(s))^j
    for k in range(2, order + 1):
        # coefficient of s^k in phi(B(s)) - s must vanish
        comp = _compose_series(a[: k + 1], b[: k + 1])
        b[k] = -comp[k] / a[1]
    return Jet(b)


def _compose_series(a, b):
    """Coefficients of sum_j a_j * (B(s))^j with B(s) = sum_{i>=1} b_i s^i."""
    n = len(b)
    out = np.zeros(n, dtype=complex)
    out[0] = a[0]
    bp = np.zeros(n, dtype=complex)
    bp[0] = 1.0
    for j in range(1, len(a)):
        bp = _series_mul(bp, b, n)
        out += a[j] * bp
    return out


def _series_mul(a, b, n):
    out = np.zeros(n, dtype=complex)
    for k in range(n):
        acc = 0.0 + 0j
        for j in range(min(k, len(a) - 1) + 1):
            i = k - j
            if i < len(b):
                acc += a[j] * b[i]
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# Laurent expansions about infinity:  phi(z) = g[0] z + g[1] + g[2]/z + ...
# represented by the coefficient array g of the analytic function
# u * phi(1/u) = g[0] + g[1] u + g[2] u^2 + ... about u = 0.
# ---------------------------------------------------------------------------

def laurent_mul(a, b, n):
    return _series_mul(np.asarray(a, complex), np.asarray(b, complex), n)


def laurent_pow(g, k, n):
    """Laurent data of phi^k: series of (u phi(1/u))^k = u^k phi(1/u)^k."""
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    base = np.asarray(g, dtype=complex)[:n]
    base = np.concatenate([base, np.zeros(max(0, n - len(base)), complex)])
    for _ in range(k):
        out = _series_mul(out, base, n)
    return out


def polynomial_part_of_power(g, k):
    """Polynomial part (including constant) of phi^k given phi's Laurent data.

    Returns ascending z-coefficients of degree k.  phi^k = z^k * (series in u),
    so the z^m coefficient (0 <= m <= k) is the u^{k-m} series coefficient.
    """
    s = laurent_pow(g, k, k + 1)
    return s[::-1].copy()  # u^{k-m} -> z^m ascending


def laurent_reversion(g, n_terms):
    """Laurent data of the inverse map psi given phi's Laurent data.

    phi(z) = c z + f0 + f1/z + ... with c = g[0] != 0; returns array e with
    psi(w) = e[0] w + e[1] + e[2]/w + ..., e[0] = 1/c, to ``n_terms`` entries.
    """
    g = np.asarray(g, dtype=complex)
    c = g[0]
    if abs(c) == 0:
        raise QuadlabError("reversion needs nonzero leading coefficient")
    e = np.zeros(n_terms, dtype=complex)
    e[0] = 1.0 / c
    if n_terms == 1:
        return e
    # fixed point: psi(w) = (w - f0 - sum_{j>=1} f_j psi(w)^{-j})/c
    for _ in range(n_terms + 2):
        e_new = np.zeros(n_terms, dtype=complex)
        e_new[0] = 1.0 / c
        if len(g) > 1:
            e_new[1] = -g[1] / c
        # accumulate - f_j * psi^{-j} / c as Laurent data offsets
        # psi(w)^{-1} = v * (1/(v psi(1/v))) in v = 1/w: series of order n
        inv_ps = _laurent_reciprocal(e, n_terms)
        term = inv_ps.copy()
        for j in range(1, len(g) - 1):
            fj = g[j + 1]
            if fj != 0:
                # psi^{-j} contributes at z-degree -j: shift series by j-1
                # term currently holds series of psi^{-j} in the same format
                shifted = np.concatenate([np.zeros(j + 1, complex), term])[:n_terms]
                e_new = e_new - fj / c * shifted
            term = _series_mul(term, inv_ps, n_terms)
        e = e_new
    return e


def _laurent_reciprocal(e, n):
    """Series s with psi(w)^{-1} = s[0]/w + s[1]/w^2 + ... given psi data e.

    psi(w) = w * (e[0] + e[1] v + ...) with v = 1/w, so psi^{-1} = v / E(v).
    Returns the coefficients of 1/E(v) (ascending in v); the caller is
    responsible for the extra v factor via index shifts.
    """
    E = np.asarray(e, dtype=complex)[:n]
    one = np.zeros(n, dtype=complex)
    one[0] = 1.0
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / E[0]
    for k in range(1, n):
        acc = 0.0 + 0j
        for j in range(1, k + 1):
            if j < len(E):
                acc += E[j] * out[k - j]
        out[k] = -acc / E[0]
    return out
