import math

import numpy as np
import pytest

from heisrect import EUCLID, TYPE1, TYPE2, Rectangle, origin, unit_ball_volume
from heisrect.rectangles import euclidean_ball_volume, slice_constant
from heisrect.splitting import canonical_frame, random_isotropic_frame


def make_rect(kind, n, d, r1, r2, center=None, frame_seed=None):
    center = origin(n) if center is None else np.asarray(center, float)
    if kind == EUCLID:
        frame = None
    elif frame_seed is None:
        frame = canonical_frame(n, d)
    else:
        frame = random_isotropic_frame(n, d, seed=frame_seed)
    return Rectangle(kind, frame, center, r1, r2)


def test_slice_constant_frozen_values():
    # independent quadrature oracle values (closed forms for even arguments:
    # K(2) = pi^2/2, K(4) = 2 pi^2/3)
    assert np.isclose(slice_constant(1), 3.4960767390561562, rtol=1e-10)
    assert np.isclose(slice_constant(2), math.pi**2 / 2, rtol=1e-10)
    assert np.isclose(slice_constant(3), 6.022509695064827, rtol=1e-10)
    assert np.isclose(slice_constant(4), 2 * math.pi**2 / 3, rtol=1e-10)
    assert np.isclose(unit_ball_volume(1), math.pi**2 / 2, rtol=1e-10)


def test_euclidean_ball_volume():
    assert np.isclose(euclidean_ball_volume(1), 2.0)
    assert np.isclose(euclidean_ball_volume(2), math.pi)
    assert np.isclose(euclidean_ball_volume(3), 4.0 * math.pi / 3.0)


def test_equal_radii_rect_is_ball_like():
    # with r1 = r2 = r the rectangle is comparable to the Koranyi r-ball:
    # same volume order and diameter order r (the exact sets differ by the
    # shear, but all scaling tests only need this comparability)
    from heisrect import koranyi_norm
    r = 0.8
    for kind in (TYPE1, TYPE2):
        rect = make_rect(kind, 1, 1, r, r)
        assert unit_ball_volume(1) * r**4 < rect.measure() < 4 * unit_ball_volume(1) * r**4
        pts = rect.sample_interior(5000, seed=1)
        assert np.max(koranyi_norm(pts)) <= 2.0 * r


def test_measure_formulas():
    rect = make_rect(TYPE1, 2, 1, 0.5, 0.7)
    expect = euclidean_ball_volume(1) * 0.5 * slice_constant(3) * 0.7**5
    assert np.isclose(rect.measure(), expect, rtol=1e-12)
    rect = make_rect(EUCLID, 1, None, 0.5, 0.7)
    assert np.isclose(rect.measure(), math.pi * 0.25 * 2 * 0.49, rtol=1e-12)


def test_sampled_points_inside():
    for kind, n, d, seed in [(TYPE1, 1, 1, 0), (TYPE2, 2, 1, 1), (TYPE2, 2, 2, 2),
                             (EUCLID, 1, None, 3)]:
        rect = make_rect(kind, n, d, 0.9, 0.4, center=np.arange(2 * n + 1) * 0.3,
                         frame_seed=None if kind == EUCLID else 5)
        pts = rect.sample_interior(5000, seed=seed)
        assert np.all(rect.contains(pts))


def test_center_is_inside():
    rect = make_rect(TYPE1, 1, 1, 0.3, 0.2, center=[1.0, -2.0, 0.5])
    assert rect.contains(np.array([1.0, -2.0, 0.5]))


def test_contains_boundary_closed():
    rect = make_rect(TYPE1, 1, 1, 1.0, 1.0)
    assert rect.contains(np.array([1.0, 0.0, 0.0]))
    assert not rect.contains(np.array([1.0 + 1e-9, 0.0, 0.0]))


def test_translate_moves_membership():
    rect = make_rect(TYPE2, 1, 1, 0.5, 0.5)
    g = np.array([0.3, -0.2, 0.1])
    moved = rect.translate(g)
    pts = rect.sample_interior(2000, seed=4)
    from heisrect import group_mul
    assert np.all(moved.contains(group_mul(g, pts)))


def test_bounding_box_contains_samples():
    rect = make_rect(TYPE1, 1, 1, 1.2, 0.5)
    lo, hi = rect.bounding_box()
    w, z = rect.frame_coords(rect.sample_interior(5000, seed=5))
    coords = np.column_stack([w, z])
    assert np.all(coords >= lo - 1e-12) and np.all(coords <= hi + 1e-12)


def test_diameter_bound():
    from heisrect import distance
    rect = make_rect(TYPE2, 1, 1, 0.7, 1.1)
    pts = rect.sample_interior(2000, seed=6)
    d = distance(pts[:1000], pts[1000:])
    assert np.max(d) <= rect.diameter_bound()


def test_json_roundtrip():
    rect = make_rect(TYPE1, 2, 1, 0.4, 0.9, center=[1, 2, 3, 4, 5], frame_seed=8)
    back = Rectangle.from_json(rect.to_json())
    assert back.kind == rect.kind and back.r1 == rect.r1 and back.r2 == rect.r2
    assert np.allclose(back.center, rect.center)
    assert np.allclose(back.frame.U, rect.frame.U)
    pts = rect.sample_interior(1000, seed=9)
    assert np.array_equal(back.contains(pts), rect.contains(pts))


def test_point_cloud():
    rect = make_rect(TYPE1, 1, 1, 0.6, 0.6)
    rows = rect.point_cloud(2000, seed=10)
    assert rows.shape == (2000, 4)
    inside = rows[:, 3].astype(bool)
    assert 0 < inside.sum() < 2000
    assert np.array_equal(rect.contains(rows[:, :3]), inside)
    with pytest.raises(ValueError):
        make_rect(TYPE1, 2, 1, 0.5, 0.5).point_cloud(10)


def test_invalid_args():
    with pytest.raises(ValueError):
        make_rect("wedge", 1, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        make_rect(TYPE1, 1, 1, -1.0, 1.0)
    with pytest.raises(ValueError):
        Rectangle(TYPE1, canonical_frame(2, 1), origin(1), 1.0, 1.0)
