"""Segmentation metrics for binary prediction/ground-truth masks.

Computes Dice, accuracy, IoU, precision and recall, per image and aggregated
as mean +/- sample standard deviation. Class 1 is vessel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

METRIC_NAMES = ("dice", "accuracy", "iou", "precision", "recall")

# Non-binary inputs are thresholded here; matches the {0, 255} mask storage.
BINARY_THRESHOLD = 128


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(pred: np.ndarray, gt: np.ndarray) -> ConfusionCounts:
    """Pixelwise confusion counts for binary masks of equal shape."""
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs gt {gt.shape}")
    p = pred != 0
    g = gt != 0
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = p.size - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: int, den: int, vacuous: bool) -> float:
    # Zero denominator: 1.0 when the condition is vacuous (nothing to get
    # wrong, i.e. empty gt and empty pred), 0.0 otherwise.
    if den == 0:
        return 1.0 if vacuous else 0.0
    return num / den


def compute_metrics(counts: ConfusionCounts) -> dict[str, float]:
    """The five metrics from confusion counts; all values in [0, 1]."""
    if counts.total == 0:
        raise ValueError("cannot compute metrics over zero pixels")
    tp, fp, fn = counts.tp, counts.fp, counts.fn
    empty_both = (tp + fp == 0) and (tp + fn == 0)
    return {
        "dice": _ratio(2 * tp, 2 * tp + fp + fn, empty_both),
        "accuracy": (tp + counts.tn) / counts.total,
        "iou": _ratio(tp, tp + fp + fn, empty_both),
        "precision": _ratio(tp, tp + fp, empty_both),
        "recall": _ratio(tp, tp + fn, empty_both),
    }


def _load_binary(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return (arr >= BINARY_THRESHOLD).astype(np.uint8)


def evaluate_dirs(pred_dir: str | Path, gt_dir: str | Path) -> dict:
    """Evaluate matching filenames across two mask directories.

    Returns per-image metrics plus mean and sample (n-1) standard deviation;
    a single image reports std 0.0. Files missing a counterpart are listed
    under "missing" and excluded.
    """
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    pred_files = {p.name: p for p in sorted(pred_dir.iterdir()) if p.is_file()}
    gt_files = {p.name: p for p in sorted(gt_dir.iterdir()) if p.is_file()}
    common = sorted(pred_files.keys() & gt_files.keys())
    missing = sorted(pred_files.keys() ^ gt_files.keys())

    per_image = []
    for name in common:
        m = compute_metrics(confusion(_load_binary(pred_files[name]), _load_binary(gt_files[name])))
        per_image.append({"name": name, **m})

    aggregate = {}
    for metric in METRIC_NAMES:
        vals = [row[metric] for row in per_image]
        if vals:
            mean = sum(vals) / len(vals)
            var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1) if len(vals) > 1 else 0.0
            aggregate[metric] = {"mean": mean, "std": math.sqrt(var)}
        else:
            aggregate[metric] = {"mean": float("nan"), "std": float("nan")}

    return {"per_image": per_image, "aggregate": aggregate, "missing": missing}


def format_table(report: dict) -> str:
    """Aligned-column text table of the aggregate metrics."""
    lines = [f"{'metric':<10} {'mean':>8} {'std':>8}"]
    for metric in METRIC_NAMES:
        agg = report["aggregate"][metric]
        lines.append(f"{metric:<10} {agg['mean']:>8.4f} {agg['std']:>8.4f}")
    if report["missing"]:
        lines.append("missing counterpart: " + ", ".join(report["missing"]))
    return "\n".join(lines)


def write_json(report: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
