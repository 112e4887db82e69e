import os

import numpy as np
import pytest

from quadlab import schwarzdyn
from quadlab.maps import EXTERIOR, MapSpec
from quadlab.ratfun import RationalFn
from quadlab.schwarzdyn import (
    EscapeGrid,
    antiholo_exp_julia,
    escape_grid,
    schwarz_reflect,
    teardrop_map,
)


def test_sigma_fixes_teardrop_boundary():
    td = teardrop_map()
    theta = 2 * np.pi * (np.arange(512) + 0.5) / 512
    w = td.boundary_values(theta)
    assert np.max(np.abs(schwarz_reflect(td, w) - w)) < 1e-8


def test_sigma_involution_near_boundary():
    td = teardrop_map()
    theta = 2 * np.pi * (np.arange(64) + 0.5) / 64
    w = td.boundary_values(theta) * (1.0 + 1e-4)  # within 1e-3 of the boundary
    ww = schwarz_reflect(td, schwarz_reflect(td, w))
    assert np.max(np.abs(ww - w)) < 1e-7


def test_sigma_two_paths_agree():
    td = teardrop_map()
    s1 = schwarz_reflect(td, 3.0 + 0j)
    z = td.eval_inverse(3.0 + 0j)
    from quadlab.classical import reflect_eval

    s2 = np.conj(reflect_eval(td, z))
    assert abs(s1 - s2) < 1e-10
    assert np.isfinite(s1)


def test_disk_exterior_reflection():
    r = 0.8
    m = MapSpec.rational(RationalFn((0.0, r), (1.0,)), EXTERIOR)
    for w in (1.5 + 0.5j, -2.0 + 0.1j):
        assert abs(schwarz_reflect(m, w) - r * r / np.conj(w)) < 1e-12
    grid = escape_grid(m, (-2, -2, 2, 2), 24, 10)
    esc = grid.escaped.astype(bool)
    xs = -2 + (np.arange(24) + 0.5) / 6
    W = xs[None, :] + 1j * xs[:, None]
    outside = np.abs(W) > r * 1.05
    # every pixel of the domain escapes in one step (inversion geometry)
    assert np.all(grid.iterations[outside & esc] <= 1)


def test_exp_julia_fixed_point_and_growth():
    g = antiholo_exp_julia((0.99, -0.01, 1.01, 0.01), 2, 50)
    assert g.escaped[0, 0] == 0 and g.escaped[1, 1] == 0  # near w = 1
    g2 = antiholo_exp_julia((99.9, -0.1, 100.1, 0.1), 2, 5)
    assert np.all(g2.escaped == 1)
    assert np.all(g2.iterations <= 2)


def test_escape_grid_runs_and_exports(tmp_path):
    td = teardrop_map()
    grid = escape_grid(td, (-3, -3, 3, 3), 64, 30)
    assert grid.escaped.shape == (64, 64)
    frac = grid.escape_fraction()
    assert 0.9 < frac <= 1.0
    ppm = tmp_path / "tile.ppm"
    png = tmp_path / "tile.png"
    grid.to_ppm(str(ppm))
    grid.to_png(str(png))
    with open(ppm, "rb") as fh:
        header = fh.read(2)
    assert header == b"P6"
    from PIL import Image

    im = Image.open(png)
    assert im.size == (64, 64)


def test_escape_radius_guard():
    with pytest.raises(ValueError):
        antiholo_exp_julia((-1, -1, 1, 1), 8, 10, escape_radius=10.0)
