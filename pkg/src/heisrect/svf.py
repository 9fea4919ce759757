"""Directed singular value functions and the limsup dimension formula.

Each rectangle family has a piecewise power law Phi^t = r1^a(t) r2^b(t)
calibrating its t-dimensional content and capacity.  Branches are taken on
closed intervals; adjacent pieces agree at the shared endpoints, so the
evaluation is continuous in t and across the aspect boundary r1 = r2.

For power-law radius sequences r_k = (c1 k^-a1, c2 k^-a2) the series
sum_k Phi^t(r_k) behaves like sum k^-E(t) with E(t) = a1*a(t) + a2*b(t)
piecewise linear and strictly increasing, so the critical exponent of the
dimension formula is found by exact piecewise-linear inversion of E(t) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rectangles import EUCLID, KINDS, TYPE1, TYPE2

__all__ = [
    "SvfSpec",
    "PowerLawFamily",
    "svf_exponents",
    "svf_eval",
    "svf_eval_radii",
    "branch_breakpoints",
    "critical_exponent",
    "dimension_predict",
    "series_partial_sum_oracle",
]

ASPECT_LE = "r1<=r2"
ASPECT_GE = "r1>=r2"


@dataclass(frozen=True)
class SvfSpec:
    kind: str
    n: int
    d: int
    t: float
    r1: float
    r2: float

    def __post_init__(self):
        _check_args(self.kind, self.n, self.d, self.t)
        if not (self.r1 > 0.0 and self.r2 > 0.0):
            raise ValueError("radii must be positive")


@dataclass(frozen=True)
class PowerLawFamily:
    """Radius sequence r_k = (c1 k^-alpha1, c2 k^-alpha2) of one kind/d."""

    kind: str
    n: int
    d: int
    alpha1: float
    alpha2: float
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        _check_args(self.kind, self.n, self.d, 0.0)
        if not (self.alpha1 > 0.0 and self.alpha2 > 0.0):
            raise ValueError("decay exponents must be positive")
        if not (self.c1 > 0.0 and self.c2 > 0.0):
            raise ValueError("prefactors must be positive")

    def radii(self, k):
        k = np.asarray(k, dtype=float)
        return self.c1 * k ** (-self.alpha1), self.c2 * k ** (-self.alpha2)


def _check_args(kind, n, d, t):
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind != EUCLID and not (1 <= d <= n):
        raise ValueError(f"d must lie in [1, n], got {d}")
    if not (0.0 <= t <= 2 * n + 2):
        raise ValueError(f"t must lie in [0, {2 * n + 2}], got {t}")


def _branches(kind, n, d, aspect):
    """List of (t_lo, t_hi, (a0, a1), (b0, b1)) with a(t) = a0 + a1*t."""
    Q = 2 * n + 2
    if kind == EUCLID:
        if aspect == ASPECT_LE:
            return [(0.0, 2.0, (0.0, 0.0), (0.0, 1.0)),
                    (2.0, Q, (-2.0, 1.0), (2.0, 0.0))]
        return [(0.0, 2 * n + 1.0, (0.0, 1.0), (0.0, 0.0)),
                (2 * n + 1.0, Q, (2.0 * (2 * n + 1), -1.0), (-2.0 * (2 * n + 1), 2.0))]
    if aspect == ASPECT_LE:
        # both types coincide when r1 <= r2
        return [(0.0, Q - d, (0.0, 0.0), (0.0, 1.0)),
                (Q - d, Q, (float(d - Q), 1.0), (float(Q - d), 0.0))]
    if kind == TYPE1:
        return [(0.0, float(d), (0.0, 1.0), (0.0, 0.0)),
                (float(d), d + 2.0, (d / 2.0, 0.5), (-d / 2.0, 0.5)),
                (d + 2.0, 2 * n + 1.0, (d + 1.0, 0.0), (-d - 1.0, 1.0)),
                (2 * n + 1.0, Q, (float(Q + d), -1.0), (float(-Q - d), 2.0))]
    return [(0.0, float(d), (0.0, 1.0), (0.0, 0.0)),
            (float(d), Q, (float(d), 0.0), (float(-d), 1.0))]


def svf_exponents(kind, n, d, t, aspect):
    """Exponent pair (a, b) with Phi^t = r1^a r2^b on the given branch."""
    _check_args(kind, n, d, t)
    if aspect not in (ASPECT_LE, ASPECT_GE):
        raise ValueError(f"unknown aspect {aspect!r}")
    for t_lo, t_hi, (a0, a1), (b0, b1) in _branches(kind, n, d, aspect):
        if t_lo <= t <= t_hi:
            return a0 + a1 * t, b0 + b1 * t
    raise AssertionError("branch table does not cover t")  # pragma: no cover


def branch_breakpoints(kind, n, d, aspect):
    """Interior t-breakpoints of the branch table (degenerate ones dropped)."""
    br = _branches(kind, n, d, aspect)
    pts = sorted({t for t_lo, t_hi, _, _ in br for t in (t_lo, t_hi)})
    return [t for t in pts if 0.0 < t < 2 * n + 2]


def svf_eval(spec):
    """Evaluate Phi^t for one (kind, n, d, t, r1, r2)."""
    aspect = ASPECT_LE if spec.r1 <= spec.r2 else ASPECT_GE
    a, b = svf_exponents(spec.kind, spec.n, spec.d, spec.t, aspect)
    return spec.r1**a * spec.r2**b


def svf_eval_radii(kind, n, d, t, r1, r2):
    """Vectorized Phi^t over arrays of radius pairs (per-element aspect)."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    a_le, b_le = svf_exponents(kind, n, d, t, ASPECT_LE)
    a_ge, b_ge = svf_exponents(kind, n, d, t, ASPECT_GE)
    return np.where(r1 <= r2, r1**a_le * r2**b_le, r1**a_ge * r2**b_ge)


def _eventual_aspect(family):
    # r1/r2 = (c1/c2) k^(alpha2 - alpha1): r1 decays faster iff alpha1 >= alpha2
    return ASPECT_LE if family.alpha1 >= family.alpha2 else ASPECT_GE


def series_decay_rate(family, t):
    """E(t) such that Phi^t(r_k) ~ k^-E(t) for large k."""
    aspect = _eventual_aspect(family)
    a, b = svf_exponents(family.kind, family.n, family.d, t, aspect)
    return family.alpha1 * a + family.alpha2 * b


def critical_exponent(family):
    """inf{t : sum_k Phi^t(r_k) < inf} clamped to [0, 2n+2].

    Solved by exact piecewise-linear inversion of E(t) = 1; the prefactors
    c1, c2 rescale the series by a constant and never move the threshold.
    """
    Q = 2 * family.n + 2
    aspect = _eventual_aspect(family)
    for t_lo, t_hi, (a0, a1), (b0, b1) in _branches(family.kind, family.n, family.d, aspect):
        if t_hi <= t_lo:
            continue
        e_lo = family.alpha1 * (a0 + a1 * t_lo) + family.alpha2 * (b0 + b1 * t_lo)
        e_hi = family.alpha1 * (a0 + a1 * t_hi) + family.alpha2 * (b0 + b1 * t_hi)
        if e_hi <= e_lo:
            raise RuntimeError("series decay rate is not increasing; bad family")
        if e_hi >= 1.0:
            if e_lo >= 1.0:
                return float(t_lo)
            return float(t_lo + (1.0 - e_lo) * (t_hi - t_lo) / (e_hi - e_lo))
    return float(Q)


def dimension_predict(family):
    """Almost-sure dimension of the random limsup set of the family."""
    return critical_exponent(family)


def series_partial_sum_oracle(family, t, K, chunk=1_000_000):
    """Brute-force partial sum sum_{k<=K} Phi^t(r_k); test oracle only."""
    if K < 1:
        raise ValueError("K must be >= 1")
    total = 0.0
    for start in range(1, int(K) + 1, chunk):
        k = np.arange(start, min(start + chunk, int(K) + 1), dtype=float)
        r1, r2 = family.radii(k)
        total += float(np.sum(svf_eval_radii(family.kind, family.n, family.d, t, r1, r2)))
    return total
