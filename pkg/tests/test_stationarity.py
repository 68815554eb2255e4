import numpy as np
import pytest

from mintwo.fixtures import FixtureSpec, generate, lo_map
from mintwo.stationarity import (BumpField, first_variation_defect,
                                 mss_residual)
from mintwo.twovalued import SingleValuedGrid, TwoValuedGrid
from mintwo.varifold import SampledVarifold, sample_graph


def _linear_pair(h):
    return generate(FixtureSpec("pair_planes", h, 1.0,
                                {"g1": [[0.3, 0.0], [0.0, -0.2]],
                                 "g2": [[0.0, 0.1], [0.4, 0.0]],
                                 "c2": [1.0, 0.0]}))


def _fields(d, radius=0.8, center=None):
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    return [BumpField("coordinate_bump", c, radius,
                      direction=np.eye(d)[-1]),
            BumpField("radial_bump", c, radius)]


def test_defect_small_on_linear_pair():
    # exact planes: the defect is pure midpoint-quadrature error
    V = sample_graph(_linear_pair(1 / 32))
    assert first_variation_defect(V, _fields(4)) < 1e-5


def test_defect_second_order_on_linear_pair():
    vals = [first_variation_defect(sample_graph(_linear_pair(h)),
                                   _fields(4))
            for h in (1 / 16, 1 / 32)]
    assert vals[1] < vals[0] / 3.5


def test_defect_linear_in_field_amplitude():
    V = sample_graph(_linear_pair(1 / 16))
    f1 = BumpField("radial_bump", np.zeros(4), 0.8, amplitude=1.0)
    f2 = BumpField("radial_bump", np.zeros(4), 0.8, amplitude=2.0)
    d1 = first_variation_defect(V, [f1])
    d2 = first_variation_defect(V, [f2])
    assert d2 == pytest.approx(2.0 * d1, rel=1e-12)


def test_defect_nonminimal_graph_bounded_below():
    # paraboloid sheets are far from stationary: the defect has a floor
    def fn(pts):
        v = np.einsum("md,md->m", pts, pts)[:, None]
        z = np.zeros_like(v)
        return np.hstack([v, z]), np.hstack([v, z + 2.0])
    g = TwoValuedGrid.from_function(fn, 2, 2, 1.0, 1 / 64)
    V = sample_graph(g)
    f = [BumpField("coordinate_bump", np.zeros(4), 0.5,
                   direction=np.eye(4)[2])]
    assert first_variation_defect(V, f) > 0.1


def test_defect_vanishes_across_four_half_plane_junction():
    # fields straddling the crossing axis: the four unit-density half
    # planes balance, so the defect decays under refinement
    vals = []
    for h in (1 / 64, 1 / 256):
        g = generate(FixtureSpec("four_half_planes", h, radius=1.0))
        V = sample_graph(g)
        vals.append(first_variation_defect(V, _fields(3, radius=0.5),
                                           max_unreliable=0.3))
    assert vals[1] < vals[0] / 10
    assert vals[1] < 1e-6


def test_defect_broken_junction_bounded_below():
    # three half lines at 0, 90 and 180 degrees: the tangent forces at the
    # junction sum to (0, 1), so no refinement makes this stationary
    ts = np.linspace(0.01, 1.0, 300)
    dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0]),
            np.array([-1.0, 0.0])]
    pts = np.vstack([ts[:, None] * d for d in dirs])
    w = np.full(len(pts), ts[1] - ts[0])
    tan = np.vstack([np.broadcast_to(d[None, None], (len(ts), 1, 2))
                     for d in dirs])
    V = SampledVarifold(1, 1, pts, w, tangents=tan)
    assert first_variation_defect(V, _fields(2, radius=0.5)) > 0.2


def test_defect_decays_on_lo_annulus():
    # the two-valued minimal graph away from its singular point: the defect
    # over bumps supported in an annulus at least halves per h-halving
    x0 = np.array([0.55, 0.0, 0.0, 0.0])
    c = np.concatenate([x0, lo_map(x0[None])[0]])
    vals = []
    for h in (1 / 8, 1 / 16):
        g = generate(FixtureSpec("lo_two_valued", h, radius=1.0))
        V = sample_graph(g)
        vals.append(first_variation_defect(V, _fields(7, radius=0.3,
                                                      center=c),
                                           max_unreliable=0.2))
    assert vals[0] > 0
    assert vals[1] < vals[0] / 1.8


def test_defect_requires_tangents():
    V = sample_graph(_linear_pair(1 / 8), with_tangents=False)
    with pytest.raises(ValueError):
        first_variation_defect(V, _fields(4))


def test_field_rejects_bad_input():
    with pytest.raises(ValueError):
        BumpField("sine_wave", np.zeros(3), 0.5)
    with pytest.raises(ValueError):
        BumpField("radial_bump", np.zeros(3), -1.0)


def _grid(fn, h=1 / 32):
    m = int(round(2.0 / h)) + 1
    return SingleValuedGrid.from_function(fn, 2, 1,
                                          np.array([-1.0, -1.0]), h, (m, m))


def test_mss_residual_exact_zero_on_linear():
    f = _grid(lambda pts: pts @ np.array([[0.3], [0.5]]))
    assert mss_residual(f, [(np.zeros(2), 0.5)]) < 1e-14


def test_mss_residual_constant_shift_invariant():
    f = _grid(lambda pts: pts @ np.array([[0.3], [0.5]])
              + 0.2 * np.sin(3 * pts[:, :1]))
    g = SingleValuedGrid(2, 1, f.origin, f.h, f.values + 7.0)
    bumps = [(np.zeros(2), 0.5), (np.array([0.2, -0.1]), 0.4)]
    assert mss_residual(g, bumps) == pytest.approx(mss_residual(f, bumps),
                                                   rel=1e-9)


def test_mss_residual_paraboloid_bounded_below():
    f = _grid(lambda pts: np.einsum("md,md->m", pts, pts)[:, None])
    assert mss_residual(f, [(np.zeros(2), 0.5)]) > 0.1


def test_mss_residual_rejects_support_touching_boundary():
    f = _grid(lambda pts: pts[:, :1])
    with pytest.raises(ValueError):
        mss_residual(f, [(np.array([0.9, 0.0]), 0.5)])
