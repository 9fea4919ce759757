"""Arithmetic of the Heisenberg group H^n.

Points are vectors (x, y, z) in R^n x R^n x R, stored as flat arrays of
length 2n+1 (x first, then y, then z).  All operations are vectorized over
leading axes and work for any n >= 1; n is inferred from the array length.

The group product twists the z-coordinate by the standard symplectic form,
the norm is the Koranyi gauge (|(x,y)|^4 + z^2)^(1/4), and the metric is
the left-invariant one d(p, q) = ||p^-1 q||.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "HPoint",
    "hpoint",
    "point_dim",
    "origin",
    "group_mul",
    "inverse",
    "koranyi_norm",
    "distance",
    "dilate",
]


def point_dim(vec):
    """Return n for a point array whose last axis has length 2n+1."""
    m = np.shape(vec)[-1]
    if m < 3 or m % 2 == 0:
        raise ValueError(f"point arrays must have odd last axis >= 3, got {m}")
    return (m - 1) // 2


def _as_vec(p):
    if isinstance(p, HPoint):
        return p.vec
    v = np.asarray(p, dtype=float)
    point_dim(v)
    return v


def _wrap(out, like):
    if isinstance(like, HPoint) and out.ndim == 1:
        return HPoint.from_vec(out)
    return out


@dataclass(frozen=True)
class HPoint:
    """A single point of H^n with coordinates x, y in R^n and z in R."""

    x: np.ndarray
    y: np.ndarray
    z: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        y = np.atleast_1d(np.asarray(self.y, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", float(self.z))
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size or x.size < 1:
            raise ValueError("x and y must be 1-d arrays of equal positive length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.isfinite(self.z)):
            raise ValueError("coordinates must be finite")

    @property
    def n(self):
        return self.x.size

    @property
    def vec(self):
        return np.concatenate([self.x, self.y, [self.z]])

    @classmethod
    def from_vec(cls, vec):
        vec = np.asarray(vec, dtype=float)
        n = point_dim(vec)
        return cls(vec[:n], vec[n : 2 * n], vec[2 * n])


def hpoint(x, y, z):
    """Convenience constructor; accepts scalars for n=1."""
    return HPoint(np.atleast_1d(x), np.atleast_1d(y), z)


def origin(n):
    """The neutral element of H^n as a flat array."""
    return np.zeros(2 * n + 1)


def _split(vec):
    n = point_dim(vec)
    return vec[..., :n], vec[..., n : 2 * n], vec[..., 2 * n]


def _sumsq(v):
    # Neumaier-compensated accumulation along the last axis; keeps the
    # degree-4 cancellation in the norm benign for wide dynamic ranges.
    v = np.asarray(v, dtype=float)
    s = np.zeros(v.shape[:-1])
    c = np.zeros(v.shape[:-1])
    for k in range(v.shape[-1]):
        term = v[..., k] * v[..., k]
        t = s + term
        c = c + np.where(np.abs(s) >= np.abs(term), (s - t) + term, (term - t) + s)
        s = t
    return s + c


def group_mul(p, q):
    """Heisenberg product p * q.

    The z-coordinate picks up 2 * sigma((x,y), (x',y')) where sigma is the
    standard symplectic form.
    """
    pv, qv = _as_vec(p), _as_vec(q)
    if pv.shape[-1] != qv.shape[-1]:
        raise ValueError("points live in different Heisenberg groups")
    x, y, z = _split(pv)
    xq, yq, zq = _split(qv)
    twist = np.sum(x * yq, axis=-1) - np.sum(y * xq, axis=-1)
    out = np.empty(np.broadcast_shapes(pv.shape, qv.shape))
    n = point_dim(pv)
    out[..., :n] = x + xq
    out[..., n : 2 * n] = y + yq
    out[..., 2 * n] = z + zq + 2.0 * twist
    return _wrap(out, p if isinstance(p, HPoint) else q)


def inverse(p):
    """Group inverse, coordinate negation (exact in floating point)."""
    return _wrap(-_as_vec(p), p)


def koranyi_norm(p):
    """Koranyi gauge (|(x,y)|^4 + z^2)^(1/4)."""
    v = _as_vec(p)
    n = point_dim(v)
    h = _sumsq(v[..., : 2 * n])
    return (h * h + v[..., 2 * n] ** 2) ** 0.25


def distance(p, q):
    """Left-invariant Koranyi metric d(p, q) = ||p^-1 q||."""
    pv, qv = _as_vec(p), _as_vec(q)
    if pv.shape[-1] != qv.shape[-1]:
        raise ValueError("points live in different Heisenberg groups")
    n = point_dim(pv)
    x, y, z = _split(pv)
    xq, yq, zq = _split(qv)
    h = _sumsq(np.concatenate(np.broadcast_arrays(xq - x, yq - y), axis=-1))
    tw = zq - z - 2.0 * (np.sum(x * yq, axis=-1) - np.sum(y * xq, axis=-1))
    return (h * h + tw * tw) ** 0.25


def dilate(p, s):
    """Intrinsic dilation (x, y, z) -> (s x, s y, s^2 z) for s > 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0.0):
        raise ValueError("dilation factor must be positive")
    v = _as_vec(p)
    n = point_dim(v)
    out = np.empty(np.broadcast_shapes(v.shape, s.shape + (1,)) if s.ndim else v.shape)
    out[..., : 2 * n] = v[..., : 2 * n] * s[..., None]
    out[..., 2 * n] = v[..., 2 * n] * s * s
    return _wrap(out, p)
