"""Reads a generated dataset manifest (JSONL header + per-sample records) and
serves verified (image, mask) pairs.

The manifest format is the external contract: ``images/<idx>.png`` and
``masks/<idx>.png`` next to ``manifest.jsonl``, with sha256 digests per file.
Pairs whose bytes do not match their recorded digest are refused by index.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

MASK_THRESHOLD = 128


class DigestMismatchError(RuntimeError):
    """A file on disk no longer matches the digest in the manifest."""


@dataclass
class ManifestDataset:
    root: Path
    header: dict
    records: list[dict]  # manifest order, optionally subset-filtered

    def __len__(self):
        return len(self.records)


def open_manifest(manifest_path: str | Path, subset: list[str] | None = None) -> ManifestDataset:
    """Parse the manifest; `subset` keeps only the listed sample ids (string
    form of the index, as few-shot plans store them), in manifest order."""
    manifest_path = Path(manifest_path)
    with open(manifest_path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or "format_version" not in lines[0]:
        raise ValueError(f"not a dataset manifest: {manifest_path}")
    header, records = lines[0], lines[1:]
    if subset is not None:
        wanted = set(subset)
        records = [r for r in records if str(r["index"]) in wanted]
        found = {str(r["index"]) for r in records}
        missing = wanted - found
        if missing:
            raise ValueError(f"subset ids not in manifest: {sorted(missing)}")
    return ManifestDataset(root=manifest_path.parent, header=header, records=records)


def _verified_bytes(root: Path, rel: str, digest: str, index) -> bytes:
    data = (root / rel).read_bytes()
    if hashlib.sha256(data).hexdigest() != digest:
        raise DigestMismatchError(f"digest mismatch for sample index {index} ({rel})")
    return data


def load_pairs(manifest_path: str | Path, subset: list[str] | None = None):
    """Yield (index, image, mask) with image uint8 HxW[xC] exactly as stored
    and mask binarized to {0, 1}; deterministic manifest order."""
    ds = open_manifest(manifest_path, subset)
    import io

    for rec in ds.records:
        img_bytes = _verified_bytes(ds.root, rec["image"], rec["image_sha256"], rec["index"])
        mask_bytes = _verified_bytes(ds.root, rec["mask"], rec["mask_sha256"], rec["index"])
        image = np.asarray(Image.open(io.BytesIO(img_bytes)))
        mask = np.asarray(Image.open(io.BytesIO(mask_bytes)))
        yield rec["index"], image, (mask >= MASK_THRESHOLD).astype(np.uint8)
