"""Alpha-matte construction and foreground/background blending.

The matte is the binary mask blurred with a truncated Gaussian and then
max-normalized to [0, 1]; the composite is I = A*F + (1-A)*B quantized once
at the end.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1D Gaussian truncated at radius ceil(4*sigma), renormalized to sum 1."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    radius = math.ceil(4.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def make_matte(mask: np.ndarray, sigma: float) -> np.ndarray:
    """Blur the binary mask and max-normalize, -> float64 (H, W) in [0, 1].

    Separable convolution with reflect padding at the borders. The grid
    maximum maps to 1 (thin masks and kernel truncation push the raw blur max
    below 1; dividing restores full-contrast vessels); an all-zero mask stays
    all-zero.
    """
    kernel = gaussian_kernel(sigma)
    m = np.asarray(mask, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("mask must be 2D")
    blurred = ndimage.correlate1d(m, kernel, axis=0, mode="reflect")
    blurred = ndimage.correlate1d(blurred, kernel, axis=1, mode="reflect")
    peak = blurred.max()
    if peak > 0:
        blurred /= peak
    return np.clip(blurred, 0.0, 1.0)


def _quantize(v: np.ndarray) -> np.ndarray:
    # Values are nonnegative here, so floor(v + 0.5) rounds half away from zero.
    return np.floor(np.clip(v, 0.0, 255.0) + 0.5).astype(np.uint8)


def blend(matte: np.ndarray, fg: np.ndarray, bg: np.ndarray) -> np.ndarray:
    """Per-pixel blend I = A*F + (1-A)*B, computed in float and quantized once.

    fg/bg are uint8, either (H, W) or (H, W, C); shapes and channel counts
    must match the matte's spatial dimensions.
    """
    matte = np.asarray(matte, dtype=np.float64)
    fg = np.asarray(fg)
    bg = np.asarray(bg)
    if fg.shape != bg.shape:
        raise ValueError(f"foreground/background shapes differ: {fg.shape} vs {bg.shape}")
    if fg.shape[:2] != matte.shape:
        raise ValueError(f"tile shape {fg.shape[:2]} does not match matte {matte.shape}")
    a = matte if fg.ndim == 2 else matte[:, :, None]
    return _quantize(a * fg.astype(np.float64) + (1.0 - a) * bg.astype(np.float64))
