"""Smoke-scale fine-tuning on a plan-entry subset of a generated split.

Trains the tiny model with per-pixel cross-entropy on the subset, checks the
loss actually decreased, and writes {0, 255} prediction PNGs that the
generator's `eval` subcommand can score directly."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch import nn

from .dataset import load_pairs
from .model import TinySegNet


class SmokeFailure(RuntimeError):
    """Training loss failed to decrease over the run."""


def _to_tensors(pairs):
    images, masks, indices = [], [], []
    for index, image, mask in pairs:
        if image.ndim == 3:  # train on luminance; the interface check is about
            image = image.mean(axis=2)  # plumbing, not color handling
        images.append(torch.from_numpy(image.astype(np.float32) / 255.0)[None])
        masks.append(torch.from_numpy(mask.astype(np.float32))[None])
        indices.append(index)
    return torch.stack(images), torch.stack(masks), indices


def smoke_finetune(
    manifest: str | Path,
    plan_entry: dict,
    epochs: int = 20,
    out_dir: str | Path = "predictions",
    lr: float = 1e-2,
    seed: int = 0,
) -> dict:
    """Fine-tune on the entry's subset (or run inference only for the n=0
    zero-shot entry), write predictions, and return the loss trace.

    Raises SmokeFailure if the final training loss is not below the initial
    loss — the overfit-one-sample sanity check."""
    subset = list(plan_entry["subset"]) or None  # empty subset == zero-shot
    images, masks, indices = _to_tensors(load_pairs(manifest, subset))

    torch.manual_seed(seed)
    model = TinySegNet(in_channels=1)
    criterion = nn.BCEWithLogitsLoss()

    losses: list[float] = []
    if subset is None:
        model.eval()  # zero-shot: no optimizer step, straight to inference
    else:
        optimizer = torch.optim.Adam(model.parameters(), lr=lr)
        model.train()
        for _ in range(epochs):
            optimizer.zero_grad()
            loss = criterion(model(images), masks)
            loss.backward()
            optimizer.step()
            losses.append(loss.item())
        if losses[-1] >= losses[0]:
            raise SmokeFailure(
                f"loss did not decrease: {losses[0]:.4f} -> {losses[-1]:.4f}"
            )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.eval()
    with torch.no_grad():
        probs = torch.sigmoid(model(images))
    for index, prob in zip(indices, probs):
        pred = (prob[0].numpy() >= 0.5).astype(np.uint8) * 255
        Image.fromarray(pred, mode="L").save(out_dir / f"{index}.png")

    return {
        "n": plan_entry["n"],
        "run": plan_entry.get("run"),
        "indices": indices,
        "losses": losses,
        "predictions": str(out_dir),
    }
