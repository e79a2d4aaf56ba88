"""Bezier-curve skeletons for synthetic vessel segments.

A vessel segment is the image of a Bezier curve with control points sampled
from the image domain. Endpoints are uniform over the image; intermediate
control points sit at equal spacings along the endpoint chord and are pushed
along the chord normal by uniform draws in [-delta, delta], which controls
tortuosity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Resample attempts before giving up on a coincident-endpoint chord.
_MAX_CHORD_RETRIES = 16
_CHORD_EPS = 1e-9

# Samples per pixel of control-polygon length when discretizing. The polygon
# length upper-bounds arc length, so 2/px oversamples; the rasterizer bridges
# any residual gaps with line segments.
_SAMPLES_PER_PX = 2.0


class DegenerateChordError(RuntimeError):
    """Endpoint resampling kept producing coincident p0/pn."""


@dataclass(frozen=True)
class BezierCurve:
    """Ordered control points, shape (n+1, 2) with n >= 1, columns (x, y)."""

    control_points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.control_points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"control points must have shape (k, 2), got {pts.shape}")
        if pts.shape[0] < 2:
            raise ValueError("a Bezier curve needs at least 2 control points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("control points must be finite")
        object.__setattr__(self, "control_points", pts)

    @property
    def order(self) -> int:
        return self.control_points.shape[0] - 1


@dataclass(frozen=True)
class CurveParams:
    """Knobs for sampling one curve."""

    order_plus_one: int
    displacement_scale: float  # delta, px
    image_width: int
    image_height: int

    def __post_init__(self):
        if self.order_plus_one < 2:
            raise ValueError("order_plus_one must be >= 2")
        if self.displacement_scale < 0:
            raise ValueError("displacement_scale must be >= 0")
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be >= 1")


def _binomials(n: int) -> np.ndarray:
    # math.comb is exact; float conversion is exact for n <= 19 (values < 2**53).
    return np.array([math.comb(n, i) for i in range(n + 1)], dtype=np.float64)


def evaluate_many(curve: BezierCurve, ts: np.ndarray) -> np.ndarray:
    """Evaluate the curve at an array of parameters in [0, 1], -> (m, 2)."""
    ts = np.asarray(ts, dtype=np.float64)
    if np.any(ts < 0.0) or np.any(ts > 1.0):
        raise ValueError("curve parameter t must lie in [0, 1]")
    n = curve.order
    m = ts.shape[0]
    # Bernstein basis C(n,i) (1-t)^(n-i) t^i; powers built by cumulative
    # multiplication, which is cheap and accurate to a few ulps for n <= 19.
    t_pow = np.ones((m, n + 1))
    s_pow = np.ones((m, n + 1))
    s = 1.0 - ts
    for i in range(1, n + 1):
        t_pow[:, i] = t_pow[:, i - 1] * ts
        s_pow[:, n - i] = s_pow[:, n - i + 1] * s
    basis = _binomials(n)[None, :] * t_pow * s_pow
    return basis @ curve.control_points


def evaluate(curve: BezierCurve, t: float) -> np.ndarray:
    """Evaluate the curve at a single parameter t in [0, 1], -> (2,)."""
    return evaluate_many(curve, np.array([t]))[0]


def sample_curve(params: CurveParams, rng: np.random.Generator) -> BezierCurve:
    """Draw one random curve.

    Endpoints are uniform over [0, W) x [0, H). The n-1 intermediate control
    points start at chord fractions 1/n .. (n-1)/n and are displaced along the
    +90-degree chord normal by independent uniform draws in [-delta, delta].
    Intermediate points may leave the image domain; clipping happens at
    rasterization.
    """
    w, h = float(params.image_width), float(params.image_height)
    p0 = np.array([rng.uniform(0.0, w), rng.uniform(0.0, h)])
    pn = np.array([rng.uniform(0.0, w), rng.uniform(0.0, h)])
    retries = 0
    while np.linalg.norm(pn - p0) < _CHORD_EPS:
        if retries >= _MAX_CHORD_RETRIES:
            raise DegenerateChordError("could not sample distinct curve endpoints")
        pn = np.array([rng.uniform(0.0, w), rng.uniform(0.0, h)])
        retries += 1

    n = params.order_plus_one - 1
    if n == 1:
        return BezierCurve(np.stack([p0, pn]))

    chord = pn - p0
    unit = chord / np.linalg.norm(chord)
    normal = np.array([-unit[1], unit[0]])  # +90-degree rotation, fixed sign
    fracs = np.arange(1, n) / n
    base = p0[None, :] + fracs[:, None] * chord[None, :]
    offsets = rng.uniform(-params.displacement_scale, params.displacement_scale, size=n - 1)
    mids = base + offsets[:, None] * normal[None, :]
    return BezierCurve(np.concatenate([p0[None, :], mids, pn[None, :]]))


def control_polygon_length(curve: BezierCurve) -> float:
    segs = np.diff(curve.control_points, axis=0)
    return float(np.sum(np.hypot(segs[:, 0], segs[:, 1])))


def discretize(curve: BezierCurve) -> np.ndarray:
    """Sample the curve at uniform parameters, -> (m, 2) with m >= 2.

    m = max(2, ceil(2 * control-polygon length in px)); the polygon length
    upper-bounds arc length so consecutive samples are typically sub-pixel,
    but closeness is not guaranteed - the rasterizer bridges gaps.
    """
    length = control_polygon_length(curve)
    m = max(2, math.ceil(_SAMPLES_PER_PX * length))
    return evaluate_many(curve, np.linspace(0.0, 1.0, m))
