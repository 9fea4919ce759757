"""Rectangle families in H^n: type 1, type 2 and the Euclidean split.

Membership is evaluated in frame coordinates: translate the candidate by the
inverse center, rotate the planar part into the frame, then apply the
canonical-frame inequalities.  In those coordinates (V = R^d x {0}):

    type 1:  |x^d| <= r1  and  |(x^perp, y)|^4 + (z + 2<x^d, y^d>)^2 <= r2^4
    type 2:  same with  z - 2<x^d, y^d>
    euclid:  |(x, y)| <= r1  and  |z| <= r2^2

The z-shear w = z -+ 2<x^d, y^d> is measure preserving, so the Lebesgue
measure factorizes exactly and interior sampling can draw from the sheared
product set with a radius-independent acceptance rate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .core import group_mul, inverse, point_dim
from .splitting import IsotropicFrame, canonical_frame

__all__ = [
    "TYPE1",
    "TYPE2",
    "EUCLID",
    "KINDS",
    "Rectangle",
    "slice_constant",
    "unit_ball_volume",
    "euclidean_ball_volume",
]

TYPE1 = "type1"
TYPE2 = "type2"
EUCLID = "euclid"
KINDS = (TYPE1, TYPE2, EUCLID)


@lru_cache(maxsize=None)
def slice_constant(m):
    """K(m) = integral of 2 sqrt(1 - |u|^4) over the unit ball of R^m.

    This is the z-extent of the unit vertical slice integrated over its
    planar footprint; the quadrature is exact to ~1e-12 relative error.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    area = 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)
    val, err = quad(lambda s: 2.0 * math.sqrt(max(1.0 - s**4, 0.0)) * s ** (m - 1), 0.0, 1.0,
                    epsabs=0.0, epsrel=1e-12, limit=200)
    return area * val


def unit_ball_volume(n):
    """Lebesgue measure of the unit Koranyi ball in H^n."""
    return slice_constant(2 * n)


def euclidean_ball_volume(m):
    """Volume of the unit Euclidean ball in R^m."""
    return math.pi ** (m / 2.0) / math.gamma(m / 2.0 + 1.0)


def _ball_points(rng, count, m, radius):
    # uniform in the Euclidean m-ball
    g = rng.standard_normal((count, m))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (radius * rng.random(count) ** (1.0 / m))[:, None]


@dataclass(frozen=True)
class Rectangle:
    """A closed rectangle: kind, frame, center (flat point array), radii."""

    kind: str
    frame: IsotropicFrame | None
    center: np.ndarray
    r1: float
    r2: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown rectangle kind {self.kind!r}")
        center = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", center)
        n = point_dim(center)
        if self.kind == EUCLID:
            object.__setattr__(self, "frame", None)
        else:
            if self.frame is None:
                object.__setattr__(self, "frame", canonical_frame(n, n))
            elif self.frame.n != n:
                raise ValueError("frame dimension does not match the center")
        if not (self.r1 > 0.0 and self.r2 > 0.0):
            raise ValueError("radii must be positive")

    @property
    def n(self):
        return point_dim(self.center)

    @property
    def d(self):
        return self.frame.d if self.frame is not None else None

    # -- membership ---------------------------------------------------------

    def frame_coords(self, pts):
        """Center-relative canonical coordinates (w, z) of given points."""
        rel = group_mul(inverse(self.center), np.asarray(pts, dtype=float))
        n = self.n
        xy = rel[..., : 2 * n]
        if self.frame is not None:
            xy = self.frame.to_frame_coords(xy)
        return xy, rel[..., 2 * n]

    def contains(self, pts):
        """Closed membership test; boundary ties count as inside."""
        w, z = self.frame_coords(pts)
        n = self.n
        if self.kind == EUCLID:
            return (np.sum(w * w, axis=-1) <= self.r1**2) & (np.abs(z) <= self.r2**2)
        d = self.d
        xd = w[..., :d]
        yd = w[..., n : n + d]
        u = np.concatenate([w[..., d:n], w[..., n:]], axis=-1)
        shear = 2.0 * np.sum(xd * yd, axis=-1)
        wz = z + shear if self.kind == TYPE1 else z - shear
        horiz = np.sum(xd * xd, axis=-1) <= self.r1**2
        vert = np.sum(u * u, axis=-1) ** 2 + wz * wz <= self.r2**4
        return horiz & vert

    def translate(self, g):
        """Left translation: the center becomes g * center."""
        return replace(self, center=group_mul(np.asarray(g, dtype=float), self.center))

    # -- geometry -----------------------------------------------------------

    def bounding_box(self):
        """Axis-aligned superset in center-relative frame coordinates.

        Returns (lo, hi) arrays of length 2n+1.  The z-bound absorbs the
        shear term |2<x^d, y^d>| <= 2 r1 r2.
        """
        n = self.n
        lo = np.empty(2 * n + 1)
        if self.kind == EUCLID:
            lo[: 2 * n] = -self.r1
            lo[2 * n] = -self.r2**2
        else:
            d = self.d
            lo[:d] = -self.r1
            lo[d:n] = -self.r2
            lo[n : n + d] = -self.r2
            lo[n + d : 2 * n] = -self.r2
            lo[2 * n] = -(self.r2**2 + 2.0 * self.r1 * self.r2)
        return lo, -lo

    def diameter_bound(self):
        """Upper bound on the Koranyi diameter."""
        m = math.sqrt(2.0) * max(self.r1, self.r2)
        zb = 3.0 * max(self.r1, self.r2) ** 2
        return 2.0 * (m**4 + zb**2) ** 0.25

    def measure(self):
        """Exact Lebesgue measure (the z-shear is measure preserving)."""
        n = self.n
        if self.kind == EUCLID:
            return euclidean_ball_volume(2 * n) * self.r1 ** (2 * n) * 2.0 * self.r2**2
        d = self.d
        return (euclidean_ball_volume(d) * self.r1**d
                * slice_constant(2 * n - d) * self.r2 ** (2 * n + 2 - d))

    # -- sampling -----------------------------------------------------------

    def sample_interior(self, count, seed=None):
        """Uniform Lebesgue samples from the rectangle, left-translated to center.

        Sampling works in sheared coordinates, where both Heisenberg kinds
        become a product set, so the rejection acceptance rate is bounded
        below independently of the aspect ratio r1/r2.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        rng = np.random.default_rng(seed)
        n = self.n
        if self.kind == EUCLID:
            xy = _ball_points(rng, count, 2 * n, self.r1)
            z = rng.uniform(-self.r2**2, self.r2**2, count)
            pts = np.concatenate([xy, z[:, None]], axis=1)
            return group_mul(self.center, pts)

        d = self.d
        m = 2 * n - d
        xd = _ball_points(rng, count, d, self.r1)
        # rejection for the vertical factor { |u|^4 + w^2 <= r2^4 }
        u = np.empty((count, m))
        wz = np.empty(count)
        need = count
        filled = 0
        tried = 0
        while need > 0:
            batch = max(2 * need, 1024)
            cu = rng.uniform(-self.r2, self.r2, (batch, m))
            cw = rng.uniform(-self.r2**2, self.r2**2, batch)
            ok = np.sum(cu * cu, axis=1) ** 2 + cw * cw <= self.r2**4
            tried += batch
            take = min(int(np.count_nonzero(ok)), need)
            u[filled : filled + take] = cu[ok][:take]
            wz[filled : filled + take] = cw[ok][:take]
            filled += take
            need -= take
            if tried > 1e4 and filled / tried < 1e-4:
                raise RuntimeError(
                    f"rejection acceptance rate {filled / tried:.2e} below 1e-4; "
                    "the sampling box does not match the rectangle")
        yd = u[:, n - d : n]  # first d coordinates of the y-block
        shear = 2.0 * np.sum(xd * yd, axis=1)
        z = wz - shear if self.kind == TYPE1 else wz + shear
        w = np.concatenate([xd, u], axis=1)
        xy = self.frame.from_frame_coords(w)
        pts = np.concatenate([xy, z[:, None]], axis=1)
        return group_mul(self.center, pts)

    def point_cloud(self, count, seed=None, margin=1.3):
        """(x, y, z, inside) rows over an enlarged bounding box; n = 1 only."""
        if self.n != 1:
            raise ValueError("point clouds are only supported for H^1")
        rng = np.random.default_rng(seed)
        lo, hi = self.bounding_box()
        pts = rng.uniform(margin * lo, margin * hi, (count, 3))
        if self.frame is not None:
            pts[:, :2] = self.frame.from_frame_coords(pts[:, :2])
        pts = group_mul(self.center, pts)
        inside = self.contains(pts)
        return np.column_stack([pts, inside.astype(float)])

    # -- serialization ------------------------------------------------------

    def to_json(self):
        obj = {"kind": self.kind, "center": self.center.tolist(),
               "r1": self.r1, "r2": self.r2,
               "frame": None if self.frame is None else json.loads(self.frame.to_json())}
        return json.dumps(obj)

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        frame = None
        if obj.get("frame") is not None:
            frame = IsotropicFrame.from_json(json.dumps(obj["frame"]))
        return cls(obj["kind"], frame, np.asarray(obj["center"], dtype=float),
                   float(obj["r1"]), float(obj["r2"]))
