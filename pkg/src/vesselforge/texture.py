"""Foreground/background texture tiles from a class-organized image pool.

The pool layout is ``root/<class-id>/<image files>``; any class-organized
directory works. A texture pair draws two distinct classes, one image per
class, then random-square-crops and bilinearly resizes each to the target
size. Procedural fallbacks allow running without a pool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

_IMAGE_EXTS = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp"}
_MAX_REDRAWS = 8

PROCEDURAL_KINDS = ("noise", "gradient", "constant")


class ConfigurationError(ValueError):
    """Pool layout cannot support texture drawing."""


@dataclass
class TexturePool:
    """Read-only index of a class-organized texture directory.

    Class and file ordering is lexicographic so RNG-indexed draws are
    reproducible across machines. Decoded images are cached; the cache is
    transparent to outputs.
    """

    root: Path
    classes: dict[str, list[Path]]
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def class_ids(self) -> list[str]:
        return sorted(self.classes)

    @property
    def num_files(self) -> int:
        return sum(len(v) for v in self.classes.values())


def open_pool(root: str | Path) -> TexturePool:
    """Index the pool. Requires at least 2 non-empty classes; empty
    subdirectories are ignored. Decode failures surface at draw time."""
    root = Path(root)
    if not root.is_dir():
        raise OSError(f"texture root is not a readable directory: {root}")
    classes: dict[str, list[Path]] = {}
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        files = sorted(
            f for f in sub.iterdir() if f.is_file() and f.suffix.lower() in _IMAGE_EXTS
        )
        if files:
            classes[sub.name] = files
    if len(classes) < 2:
        raise ConfigurationError(
            f"texture pool needs >= 2 non-empty classes, found {len(classes)} under {root}"
        )
    return TexturePool(root=root, classes=classes)


def _bt601_gray(rgb: np.ndarray) -> np.ndarray:
    luma = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.floor(luma + 0.5).astype(np.uint8)  # round half away from zero


def _decode(pool: TexturePool, path: Path, channels: int) -> np.ndarray:
    key = (path, channels)
    if key not in pool._cache:
        with Image.open(path) as im:
            rgb = np.asarray(im.convert("RGB"), dtype=np.uint8)
        pool._cache[key] = _bt601_gray(rgb.astype(np.float64)) if channels == 1 else rgb
    return pool._cache[key]


def resize_bilinear(img: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """Bilinear resize with half-pixel center alignment.

    Source coordinate of output center j is (j + 0.5) * in/out - 0.5, clamped
    to the source range; interpolation runs in float64 and the result is
    rounded half away from zero to uint8. This is the bit-exact contract the
    determinism tests rely on.
    """
    in_h, in_w = img.shape[:2]
    ys = np.clip((np.arange(target_h) + 0.5) * (in_h / target_h) - 0.5, 0, in_h - 1)
    xs = np.clip((np.arange(target_w) + 0.5) * (in_w / target_w) - 0.5, 0, in_w - 1)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    if img.ndim == 3:
        wy = wy[:, :, None]
        wx = wx[:, :, None]
    f = img.astype(np.float64)
    top = f[y0][:, x0] * (1 - wx) + f[y0][:, x1] * wx
    bot = f[y1][:, x0] * (1 - wx) + f[y1][:, x1] * wx
    return np.floor(top * (1 - wy) + bot * wy + 0.5).astype(np.uint8)


def _crop_and_resize(
    img: np.ndarray, target_w: int, target_h: int, rng: np.random.Generator
) -> tuple[np.ndarray, dict]:
    h, w = img.shape[:2]
    m = min(h, w)
    side = int(rng.integers(max(1, math.ceil(m / 2)), m + 1))
    top = int(rng.integers(0, h - side + 1))
    left = int(rng.integers(0, w - side + 1))
    crop = img[top : top + side, left : left + side]
    tile = resize_bilinear(crop, target_h, target_w)
    return tile, {"crop_top": top, "crop_left": left, "crop_side": side}


def draw_texture_pair(
    pool: TexturePool,
    target_w: int,
    target_h: int,
    rng: np.random.Generator,
    channels: int = 3,
) -> tuple[np.ndarray, np.ndarray, list[dict]]:
    """Draw (foreground, background) tiles from two distinct classes.

    Returns the two tiles plus provenance records (class, file, crop box).
    Undecodable files are skipped with a redraw, up to a bounded number of
    attempts.
    """
    class_ids = pool.class_ids
    picked = rng.choice(len(class_ids), size=2, replace=False)
    tiles = []
    info: list[dict] = []
    for ci in picked:
        files = pool.classes[class_ids[int(ci)]]
        img = None
        chosen = None
        for _ in range(_MAX_REDRAWS):
            chosen = files[int(rng.integers(0, len(files)))]
            try:
                img = _decode(pool, chosen, channels)
                break
            except OSError:
                continue
        if img is None:
            raise OSError(f"could not decode any image in class {class_ids[int(ci)]!r}")
        tile, crop = _crop_and_resize(img, target_w, target_h, rng)
        tiles.append(tile)
        info.append({"class": class_ids[int(ci)], "file": chosen.name, **crop})
    return tiles[0], tiles[1], info


def procedural_fallback(
    kind: str,
    target_w: int,
    target_h: int,
    rng: np.random.Generator,
    channels: int = 3,
    level: int = 128,
) -> np.ndarray:
    """Deterministic synthetic tile: uniform noise, an x-axis ramp, or a
    constant level. Enables pool-free generation and testing."""
    shape = (target_h, target_w) if channels == 1 else (target_h, target_w, channels)
    if kind == "noise":
        return rng.integers(0, 256, size=shape, dtype=np.uint8)
    if kind == "gradient":
        ramp = np.floor(np.linspace(0.0, 255.0, target_w) + 0.5).astype(np.uint8)
        return np.broadcast_to(
            ramp[None, :] if channels == 1 else ramp[None, :, None], shape
        ).copy()
    if kind == "constant":
        return np.full(shape, level, dtype=np.uint8)
    raise ValueError(f"unknown procedural texture kind: {kind!r}")
