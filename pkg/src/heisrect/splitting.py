"""Symplectic structure and group splittings of H^n.

An isotropic subspace V of R^2n (one on which the symplectic form vanishes)
splits the Heisenberg group in two ways, H = Vperp |x V and H = V |x Vperp,
giving two pairs of horizontal/vertical projections.  Frames are stored as
full 2n x 2n orthosymplectic matrices whose first d columns span V, so both
orthogonal projections are plain matrix products.

Random frames are Haar-distributed: a complex Ginibre matrix is
orthonormalized by QR with a sign-fixed diagonal and mapped to its real
block representation [[A, -B], [B, A]], which is exactly the orthosymplectic
group for the convention sigma((x,y),(x',y')) = <x,y'> - <y,x'>.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import point_dim

__all__ = [
    "sigma",
    "symplectic_matrix",
    "IsotropicFrame",
    "canonical_frame",
    "random_orthosymplectic",
    "random_isotropic_frame",
    "induced_map",
    "project_P",
    "project_Q",
]


def symplectic_matrix(n):
    """Block matrix J with sigma(u, v) = u^T J v."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def sigma(u, v):
    """Standard symplectic form <x,y'> - <y,x'> on R^2n (vectorized)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != v.shape[-1] or u.shape[-1] % 2 != 0:
        raise ValueError("sigma needs two vectors of the same even length")
    n = u.shape[-1] // 2
    return np.sum(u[..., :n] * v[..., n:], axis=-1) - np.sum(u[..., n:] * v[..., :n], axis=-1)


@dataclass(frozen=True)
class IsotropicFrame:
    """Orthosymplectic matrix whose first d columns span an isotropic V."""

    n: int
    d: int
    U: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float)
        object.__setattr__(self, "U", U)
        if not (1 <= self.d <= self.n):
            raise ValueError(f"d must lie in [1, n], got d={self.d}, n={self.n}")
        if U.shape != (2 * self.n, 2 * self.n):
            raise ValueError("frame matrix has wrong shape")

    def validate(self, tol=1e-10):
        """Check orthonormality, sigma-preservation and isotropy of V."""
        U, n, d = self.U, self.n, self.d
        J = symplectic_matrix(n)
        if np.max(np.abs(U.T @ U - np.eye(2 * n))) > tol:
            raise ValueError("frame columns are not orthonormal")
        if np.max(np.abs(U.T @ J @ U - J)) > tol:
            raise ValueError("frame does not preserve the symplectic form")
        if np.max(np.abs(U[:, :d].T @ J @ U[:, :d])) > tol:
            raise ValueError("first d columns do not span an isotropic subspace")

    def to_frame_coords(self, xy):
        """Rotate planar coordinates into the frame (V becomes the first d axes)."""
        return np.asarray(xy, dtype=float) @ self.U

    def from_frame_coords(self, w):
        return np.asarray(w, dtype=float) @ self.U.T

    def to_json(self):
        return json.dumps({"n": self.n, "d": self.d, "U": self.U.ravel().tolist()})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        n, d = int(obj["n"]), int(obj["d"])
        U = np.asarray(obj["U"], dtype=float).reshape(2 * n, 2 * n)
        frame = cls(n, d, U)
        frame.validate()
        return frame


def canonical_frame(n, d):
    """The identity frame; V = R^d x {0} in the x-block."""
    return IsotropicFrame(n, d, np.eye(2 * n))


def random_orthosymplectic(n, seed=None):
    """Haar-random orthosymplectic 2n x 2n matrix."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    diag = np.diagonal(R)
    Q = Q * (diag / np.abs(diag))
    A, B = Q.real, Q.imag
    return np.block([[A, -B], [B, A]])


def random_isotropic_frame(n, d, seed=None):
    """Haar push-forward frame: a random orthosymplectic map of the canonical one."""
    if not (1 <= d <= n):
        raise ValueError(f"d must lie in [1, n], got d={d}, n={n}")
    return IsotropicFrame(n, d, random_orthosymplectic(n, seed))


def induced_map(M, pts):
    """Apply (x, y, z) -> (M(x,y), z), the isometry induced by M in U(n)."""
    pts = np.asarray(pts, dtype=float)
    n = point_dim(pts)
    out = pts.copy()
    out[..., : 2 * n] = pts[..., : 2 * n] @ np.asarray(M).T
    return out


def _split_xy(frame, pts):
    pts = np.asarray(pts, dtype=float)
    n = point_dim(pts)
    if n != frame.n:
        raise ValueError("point dimension does not match the frame")
    xy = pts[..., : 2 * n]
    UV = frame.U[:, : frame.d]
    xy_v = (xy @ UV) @ UV.T
    return xy_v, xy - xy_v, pts[..., 2 * n]


def _assemble(xy, z):
    out = np.empty(np.broadcast_shapes(xy.shape[:-1], np.shape(z)) + (xy.shape[-1] + 1,))
    out[..., :-1] = xy
    out[..., -1] = z
    return out


def project_P(frame, pts):
    """Splitting H = Vperp |x V: returns (horizontal, vertical) with v * h = p."""
    xy_v, xy_perp, z = _split_xy(frame, pts)
    h = _assemble(xy_v, 0.0)
    v = _assemble(xy_perp, z - 2.0 * sigma(xy_perp, xy_v))
    return h, v


def project_Q(frame, pts):
    """Splitting H = V |x Vperp: returns (horizontal, vertical) with h * v = p."""
    xy_v, xy_perp, z = _split_xy(frame, pts)
    h = _assemble(xy_v, 0.0)
    v = _assemble(xy_perp, z + 2.0 * sigma(xy_perp, xy_v))
    return h, v
