"""End-to-end sample generation: deterministic, parallel, manifest-backed.

Every sample is fully determined by (generation params, texture pool content,
sample index). A per-sample RNG stream is derived from (master_seed, index),
so results never depend on worker count or execution order.

The per-sample draw order is fixed and versioned (format_version 1):
  1. K (number of curves), integer uniform inclusive
  2. delta, real uniform
  3. per curve: n+1 integer uniform inclusive, then the curve's point draws
  4. r0, integer uniform inclusive
  5. sigma, real uniform
  6. texture draws (class/file/crop for pools, tile draws for procedural)
Any reordering changes outputs and would be a format break.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import queue
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from PIL import Image

from . import compositor, geometry, raster, texture

FORMAT_VERSION = 1
THREADS_ENV_VAR = "VESSELFORGE_THREADS"


@dataclass(frozen=True)
class GenerationParams:
    """All generation knobs; defaults are the standard sampling ranges."""

    num_curves_range: tuple[int, int] = (1, 20)
    control_points_range: tuple[int, int] = (2, 20)
    delta_range: tuple[float, float] = (50.0, 150.0)
    r0_range: tuple[int, int] = (1, 5)
    sigma_range: tuple[float, float] = (1.0, 2.0)
    image_width: int = 256
    image_height: int = 256
    channels: int = 3
    master_seed: int = 0
    texture_mode: str = "procedural"  # "procedural" | "pool"
    texture_root: str | None = None
    procedural_kind: str = "noise"

    def __post_init__(self):
        for name in ("num_curves_range", "control_points_range", "r0_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must satisfy low <= high, got {(lo, hi)}")
        for name in ("delta_range", "sigma_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} must satisfy low <= high, got {(lo, hi)}")
        if self.num_curves_range[0] < 1:
            raise ValueError("num_curves_range low must be >= 1")
        if self.control_points_range[0] < 2:
            raise ValueError("control_points_range low must be >= 2")
        if self.r0_range[0] < 0:
            raise ValueError("r0_range low must be >= 0")
        if self.sigma_range[0] <= 0:
            raise ValueError("sigma_range low must be > 0")
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative 64-bit integer")
        if self.texture_mode not in ("procedural", "pool"):
            raise ValueError("texture_mode must be 'procedural' or 'pool'")
        if self.texture_mode == "pool" and not self.texture_root:
            raise ValueError("texture_mode 'pool' requires texture_root")
        if self.procedural_kind not in texture.PROCEDURAL_KINDS:
            raise ValueError(f"unknown procedural_kind {self.procedural_kind!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationParams":
        kw = dict(d)
        for name in (
            "num_curves_range",
            "control_points_range",
            "delta_range",
            "r0_range",
            "sigma_range",
        ):
            if name in kw and kw[name] is not None:
                kw[name] = tuple(kw[name])
        return cls(**kw)


@dataclass
class SampleParams:
    """Concrete per-sample draws, sufficient to re-derive the mask."""

    index: int
    num_curves: int
    delta: float
    r0: int
    sigma: float
    curve_orders: list[int]  # n+1 per curve
    curves: list[np.ndarray] = field(repr=False)
    textures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "num_curves": self.num_curves,
            "delta": self.delta,
            "r0": self.r0,
            "sigma": self.sigma,
            "curve_orders": self.curve_orders,
            "curves": [c.tolist() for c in self.curves],
            "textures": self.textures,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SampleParams":
        return cls(
            index=d["index"],
            num_curves=d["num_curves"],
            delta=d["delta"],
            r0=d["r0"],
            sigma=d["sigma"],
            curve_orders=list(d["curve_orders"]),
            curves=[np.asarray(c, dtype=np.float64) for c in d["curves"]],
            textures=list(d.get("textures", [])),
        )


@dataclass
class SamplePair:
    index: int
    image: np.ndarray  # uint8, (H, W) or (H, W, 3)
    mask: np.ndarray  # uint8 {0, 1}, (H, W)
    params_used: SampleParams


def sample_rng(master_seed: int, index: int) -> np.random.Generator:
    """Per-sample stream: PCG64 seeded from SeedSequence([master_seed, index])."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, index]))


def _uniform_int(rng: np.random.Generator, lo: int, hi: int) -> int:
    return int(rng.integers(lo, hi + 1))


def _draw(params: GenerationParams, index: int, rng: np.random.Generator) -> SampleParams:
    k = _uniform_int(rng, *params.num_curves_range)
    delta = float(rng.uniform(*params.delta_range))
    orders: list[int] = []
    curves: list[np.ndarray] = []
    for _ in range(k):
        n_plus_1 = _uniform_int(rng, *params.control_points_range)
        cp = geometry.CurveParams(
            order_plus_one=n_plus_1,
            displacement_scale=delta,
            image_width=params.image_width,
            image_height=params.image_height,
        )
        curves.append(geometry.sample_curve(cp, rng).control_points)
        orders.append(n_plus_1)
    r0 = _uniform_int(rng, *params.r0_range)
    sigma = float(rng.uniform(*params.sigma_range))
    return SampleParams(
        index=index,
        num_curves=k,
        delta=delta,
        r0=r0,
        sigma=sigma,
        curve_orders=orders,
        curves=curves,
    )


def draw_sample_params(params: GenerationParams, index: int) -> SampleParams:
    """Draw the geometric/scalar parameters of one sample without rendering.

    Texture draws are excluded; they follow in the same stream inside
    generate_sample."""
    return _draw(params, index, sample_rng(params.master_seed, index))


_POOL_CACHE: dict[str, texture.TexturePool] = {}


def _get_pool(root: str) -> texture.TexturePool:
    if root not in _POOL_CACHE:
        _POOL_CACHE[root] = texture.open_pool(root)
    return _POOL_CACHE[root]


def _draw_textures(
    params: GenerationParams, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, list[dict]]:
    w, h, c = params.image_width, params.image_height, params.channels
    if params.texture_mode == "pool":
        return texture.draw_texture_pair(_get_pool(params.texture_root), w, h, rng, c)
    fg = texture.procedural_fallback(params.procedural_kind, w, h, rng, c)
    bg = texture.procedural_fallback(params.procedural_kind, w, h, rng, c)
    info = [{"procedural": params.procedural_kind, "role": r} for r in ("fg", "bg")]
    return fg, bg, info


def render_mask(sample: SampleParams, width: int, height: int) -> np.ndarray:
    """Rebuild the binary mask from recorded per-sample draws."""
    curves = [geometry.BezierCurve(c) for c in sample.curves]
    return raster.build_mask(curves, sample.r0, width, height)


def generate_sample(params: GenerationParams, index: int) -> SamplePair:
    """Generate one (image, mask) pair; deterministic in (params, pool, index)."""
    rng = sample_rng(params.master_seed, index)
    try:
        drawn = _draw(params, index, rng)
        mask = render_mask(drawn, params.image_width, params.image_height)
        matte = compositor.make_matte(mask, drawn.sigma)
        fg, bg, tex_info = _draw_textures(params, rng)
        image = compositor.blend(matte, fg, bg)
    except Exception as exc:
        raise RuntimeError(f"sample {index} failed: {exc}") from exc
    drawn.textures = tex_info
    return SamplePair(index=index, image=image, mask=mask, params_used=drawn)


def png_bytes(arr: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def _write_sample(out_dir: Path, pair: SamplePair) -> dict:
    img_bytes = png_bytes(pair.image)
    mask_bytes = png_bytes((pair.mask * 255).astype(np.uint8))
    img_rel = f"images/{pair.index}.png"
    mask_rel = f"masks/{pair.index}.png"
    (out_dir / img_rel).write_bytes(img_bytes)
    (out_dir / mask_rel).write_bytes(mask_bytes)
    return {
        "index": pair.index,
        "image": img_rel,
        "mask": mask_rel,
        "image_sha256": hashlib.sha256(img_bytes).hexdigest(),
        "mask_sha256": hashlib.sha256(mask_bytes).hexdigest(),
        "params_used": pair.params_used.to_dict(),
    }


def _worker_generate(params_dict: dict, index: int, out_dir: str) -> dict:
    params = GenerationParams.from_dict(params_dict)
    return _write_sample(Path(out_dir), generate_sample(params, index))


def resolve_workers(workers: int | None) -> int:
    """Requested worker count, capped by the VESSELFORGE_THREADS env var."""
    w = workers if workers and workers >= 1 else 1
    cap = os.environ.get(THREADS_ENV_VAR)
    if cap:
        w = min(w, max(1, int(cap)))
    return w


def generate_split(
    params: GenerationParams, count: int, out_dir: str | Path, workers: int = 1
) -> dict:
    """Write `count` pairs plus a manifest; output is identical for any
    workers >= 1. Returns the manifest as a dict (header + records)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    (out_dir / "masks").mkdir(parents=True, exist_ok=True)
    workers = resolve_workers(workers)

    indices = range(count)
    if workers == 1:
        records = [_write_sample(out_dir, generate_sample(params, i)) for i in indices]
    else:
        params_dict = params.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_worker_generate, params_dict, i, str(out_dir))
                for i in indices
            ]
            records = [f.result() for f in futures]
    records.sort(key=lambda r: r["index"])

    header = {"format_version": FORMAT_VERSION, "params": params.to_dict()}
    with open(out_dir / "manifest.jsonl", "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return {"header": header, "records": records, "path": str(out_dir / "manifest.jsonl")}


def read_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or "format_version" not in lines[0]:
        raise ValueError(f"not a vesselforge manifest: {path}")
    return lines[0], lines[1:]


def manifest_digest(records: list[dict]) -> str:
    """Combined digest over all per-file digests, order-independent by index."""
    h = hashlib.sha256()
    for rec in sorted(records, key=lambda r: r["index"]):
        h.update(rec["image_sha256"].encode())
        h.update(rec["mask_sha256"].encode())
    return h.hexdigest()


def stream_samples(params: GenerationParams, start_index: int = 0, batch: int = 8):
    """Yield consecutive SamplePairs from start_index, indefinitely.

    A background thread prefetches up to `batch` samples ahead; the bounded
    queue provides backpressure, so memory stays flat however far the stream
    runs.
    """
    if batch < 1:
        raise ValueError("batch must be >= 1")
    q: queue.Queue = queue.Queue(maxsize=batch)
    stop = threading.Event()

    def produce():
        i = start_index
        while not stop.is_set():
            item = generate_sample(params, i)
            while not stop.is_set():
                try:
                    q.put(item, timeout=0.1)
                    break
                except queue.Full:
                    continue
            i += 1

    worker = threading.Thread(target=produce, daemon=True)
    worker.start()
    try:
        while True:
            yield q.get()
    finally:
        stop.set()


def _worker_digest(params_dict: dict, index: int) -> str:
    params = GenerationParams.from_dict(params_dict)
    pair = generate_sample(params, index)
    return hashlib.sha256(pair.image.tobytes() + pair.mask.tobytes()).hexdigest()


def bench(
    params: GenerationParams, count: int, worker_counts: tuple[int, ...] = (1, 2, 4)
) -> dict:
    """Measure per-stage timings and worker scaling.

    Stage timings come from an instrumented sequential pass; worker scaling
    from process pools computing (but not writing) samples.
    """
    if count < 100:
        raise ValueError("bench needs count >= 100 for stable numbers")

    stages = {"geometry": 0.0, "raster": 0.0, "matte": 0.0, "texture": 0.0, "blend": 0.0}
    t_total0 = time.perf_counter()
    for i in range(count):
        rng = sample_rng(params.master_seed, i)
        t0 = time.perf_counter()
        drawn = _draw(params, i, rng)
        t1 = time.perf_counter()
        mask = render_mask(drawn, params.image_width, params.image_height)
        t2 = time.perf_counter()
        matte = compositor.make_matte(mask, drawn.sigma)
        t3 = time.perf_counter()
        fg, bg, _ = _draw_textures(params, rng)
        t4 = time.perf_counter()
        compositor.blend(matte, fg, bg)
        t5 = time.perf_counter()
        stages["geometry"] += t1 - t0
        stages["raster"] += t2 - t1
        stages["matte"] += t3 - t2
        stages["texture"] += t4 - t3
        stages["blend"] += t5 - t4
    total = time.perf_counter() - t_total0

    scaling = {}
    params_dict = params.to_dict()
    for w in worker_counts:
        w = resolve_workers(w)
        t0 = time.perf_counter()
        if w == 1:
            for i in range(count):
                _worker_digest(params_dict, i)
        else:
            with ProcessPoolExecutor(max_workers=w) as pool:
                list(pool.map(_worker_digest, [params_dict] * count, range(count), chunksize=8))
        scaling[str(w)] = count / (time.perf_counter() - t0)

    return {
        "count": count,
        "total_seconds": total,
        "samples_per_second": count / total,
        "stage_seconds": stages,  # insertion order is the pipeline order
        "workers_samples_per_second": scaling,
    }
