import numpy as np
import pytest

from quadlab.maps import EXTERIOR, INTERIOR, MapSpec
from quadlab.ratfun import RationalFn


@pytest.fixture
def rng():
    return np.random.default_rng(20240819)


@pytest.fixture
def cardioid():
    """phi(z) = z + z^2/2 on the disk."""
    return MapSpec.rational(RationalFn((0.0, 1.0, 0.5)), INTERIOR)


@pytest.fixture
def disk_map():
    """phi(z) = w0 + r z with w0 = 1+i, r = 0.7."""
    return MapSpec.rational(RationalFn((1.0 + 1.0j, 0.7)), INTERIOR)


@pytest.fixture
def ellipse_map():
    """phi(z) = c(z + conj(alpha)/z), c = 1.3, alpha = 0.4."""
    c, al = 1.3, 0.4
    return MapSpec.rational(RationalFn((c * np.conj(al), 0.0, c), (0.0, 1.0)),
                            EXTERIOR)


def random_ratfn(rng, max_deg=4, pole_sep=0.15):
    """Random canonical rational function with separated poles."""
    for _ in range(50):
        dn = rng.integers(0, max_deg + 1)
        dd = rng.integers(0, max_deg + 1)
        num = rng.normal(size=dn + 1) + 1j * rng.normal(size=dn + 1)
        den_roots = rng.normal(size=dd) + 1j * rng.normal(size=dd)
        ok = all(abs(a - b) > pole_sep
                 for i, a in enumerate(den_roots)
                 for b in den_roots[i + 1:])
        if not ok:
            continue
        from numpy.polynomial import polynomial as P

        den = P.polyfromroots(den_roots) if dd else np.array([1.0 + 0j])
        return RationalFn(num, den)
    raise RuntimeError("could not draw a separated-pole rational function")
