import json

import numpy as np
import pytest

from heisrect import (IsotropicFrame, canonical_frame, distance, group_mul,
                      project_P, project_Q, random_isotropic_frame,
                      random_orthosymplectic, sigma)
from heisrect.splitting import induced_map, symplectic_matrix


def test_sigma_values():
    assert sigma(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    assert sigma(np.array([0.0, 1.0]), np.array([1.0, 0.0])) == -1.0
    u = np.array([1.0, 2.0, 3.0, 4.0])
    assert sigma(u, u) == 0.0
    J = symplectic_matrix(2)
    v = np.array([0.5, -1.0, 2.0, 0.0])
    assert np.isclose(sigma(u, v), u @ J @ v)


def test_sigma_antisymmetric_random():
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal((2, 100, 4))
    assert np.allclose(sigma(u, v), -sigma(v, u))


def test_canonical_frame_valid():
    for n in (1, 2, 3):
        for d in range(1, n + 1):
            canonical_frame(n, d).validate()


def test_random_orthosymplectic_properties():
    for n in (1, 2, 3):
        M = random_orthosymplectic(n, seed=n)
        assert np.allclose(M.T @ M, np.eye(2 * n), atol=1e-12)
        J = symplectic_matrix(n)
        assert np.allclose(M.T @ J @ M, J, atol=1e-12)


def test_random_frame_isotropic_and_deterministic():
    f1 = random_isotropic_frame(3, 2, seed=7)
    f2 = random_isotropic_frame(3, 2, seed=7)
    f1.validate()
    assert np.allclose(f1.U, f2.U)
    with pytest.raises(ValueError):
        random_isotropic_frame(2, 3)


def test_frame_coords_roundtrip():
    frame = random_isotropic_frame(2, 1, seed=1)
    rng = np.random.default_rng(2)
    xy = rng.standard_normal((50, 4))
    assert np.allclose(frame.from_frame_coords(frame.to_frame_coords(xy)), xy)


def test_frame_json_roundtrip():
    frame = random_isotropic_frame(2, 2, seed=3)
    back = IsotropicFrame.from_json(frame.to_json())
    assert back.n == 2 and back.d == 2
    assert np.allclose(back.U, frame.U)
    # corrupted matrices are rejected on load
    obj = json.loads(frame.to_json())
    obj["U"][0] += 0.5
    with pytest.raises(ValueError):
        IsotropicFrame.from_json(json.dumps(obj))


def test_induced_map_is_isometry():
    rng = np.random.default_rng(4)
    M = random_orthosymplectic(2, seed=5)
    p, q = rng.uniform(-1, 1, (2, 200, 5))
    assert np.allclose(distance(induced_map(M, p), induced_map(M, q)),
                       distance(p, q), rtol=1e-9)


@pytest.mark.parametrize("n,d,seed", [(1, 1, 0), (2, 1, 1), (2, 2, 2), (3, 2, 3)])
def test_projections_reconstruct(n, d, seed):
    frame = random_isotropic_frame(n, d, seed=seed)
    rng = np.random.default_rng(seed + 10)
    pts = rng.uniform(-2, 2, (200, 2 * n + 1))
    h, v = project_P(frame, pts)
    assert np.allclose(group_mul(v, h), pts, atol=1e-10)
    h, v = project_Q(frame, pts)
    assert np.allclose(group_mul(h, v), pts, atol=1e-10)


def test_projection_components_live_in_subgroups():
    n, d = 2, 1
    frame = random_isotropic_frame(n, d, seed=6)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2, 2, (100, 2 * n + 1))
    UV = frame.U[:, :d]
    for proj in (project_P, project_Q):
        h, v = proj(frame, pts)
        # horizontal part: in V x {0}
        assert np.allclose(h[:, -1], 0.0)
        hx = h[:, : 2 * n]
        assert np.allclose(hx @ UV @ UV.T, hx, atol=1e-10)
        # vertical part: planar coordinates orthogonal to V
        assert np.allclose(v[:, : 2 * n] @ UV, 0.0, atol=1e-10)
