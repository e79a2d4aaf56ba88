"""Binary mask construction: polyline rasterization and disk dilation.

Masks are uint8 arrays of shape (H, W) holding {0, 1}. Pixel (x, y) maps to
mask[y, x].
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .geometry import BezierCurve, discretize


def disk_structure(r0: int) -> np.ndarray:
    """Boolean disk of offsets with dx^2 + dy^2 <= r0^2, shape (2r0+1, 2r0+1)."""
    if r0 < 0:
        raise ValueError("dilation radius must be >= 0")
    d = np.arange(-r0, r0 + 1)
    return (d[:, None] ** 2 + d[None, :] ** 2) <= r0 * r0


def _round_half_up(v: np.ndarray) -> np.ndarray:
    # Round half toward +inf; the documented tie rule for the rasterizer.
    return np.floor(v + 0.5).astype(np.int64)


def rasterize_polyline(points: np.ndarray, width: int, height: int) -> np.ndarray:
    """Draw an 8-connected 1-px polyline through the given points.

    Points are rounded to the nearest pixel; consecutive rounded points are
    connected by integer line drawing (for step k of n along the driving axis,
    the minor coordinate is floor(minor0 + k * slope + 0.5)). Pixels outside
    the grid are dropped, so out-of-grid geometry is clipped silently.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
        raise ValueError("rasterize_polyline needs at least 2 points of shape (m, 2)")

    px = _round_half_up(points[:, 0])
    py = _round_half_up(points[:, 1])
    dx = np.diff(px)
    dy = np.diff(py)
    nsteps = np.maximum(np.maximum(np.abs(dx), np.abs(dy)), 1)

    reps = nsteps + 1
    pair = np.repeat(np.arange(len(dx)), reps)
    k = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
    frac = k / nsteps[pair]
    xs = px[:-1][pair] + _round_half_up(frac * dx[pair])
    ys = py[:-1][pair] + _round_half_up(frac * dy[pair])

    mask = np.zeros((height, width), dtype=np.uint8)
    keep = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
    mask[ys[keep], xs[keep]] = 1
    return mask


def dilate_disk(mask: np.ndarray, r0: int) -> np.ndarray:
    """Dilate with a Euclidean disk: output q is 1 iff some input pixel p is 1
    with ||q - p||^2 <= r0^2. r0 = 0 is the identity."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError("mask must be 2D")
    if r0 == 0:
        return (mask != 0).astype(np.uint8)
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return np.zeros_like(mask, dtype=np.uint8)
    # Stamp the disk at every set pixel into a padded canvas; this is the
    # definition itself (q on iff some p within Euclidean radius r0).
    dy, dx = np.nonzero(disk_structure(r0))
    padded = np.zeros((h + 2 * r0, w + 2 * r0), dtype=np.uint8)
    for oy, ox in zip(dy, dx):
        padded[ys + oy, xs + ox] = 1
    return padded[r0 : r0 + h, r0 : r0 + w]


def build_mask(curves: list[BezierCurve], r0: int, width: int, height: int) -> np.ndarray:
    """Union of the curves' rasterized skeletons, then one disk dilation."""
    if not curves:
        raise ValueError("build_mask needs at least one curve")
    skeleton = np.zeros((height, width), dtype=np.uint8)
    for curve in curves:
        skeleton |= rasterize_polyline(discretize(curve), width, height)
    return dilate_disk(skeleton, r0)
