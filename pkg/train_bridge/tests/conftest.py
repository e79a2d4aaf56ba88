import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

GENERATOR = [sys.executable, "-m", "vesselforge.cli"]


@pytest.fixture(scope="session")
def generator_cli():
    return run_generator


def run_generator(*args, check=True):
    proc = subprocess.run(
        [*GENERATOR, *args], capture_output=True, text=True
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"generator CLI failed: {proc.stderr}")
    return proc


@pytest.fixture(scope="session")
def texture_pool(tmp_path_factory):
    """Two well-separated texture classes (bright vs dark noise) so a tiny
    model can tell vessel from background from intensity alone."""
    root = tmp_path_factory.mktemp("textures")
    rng = np.random.default_rng(42)
    for name, lo, hi in [("bright", 180, 255), ("dark", 0, 70)]:
        cls = root / name
        cls.mkdir()
        for i in range(3):
            arr = rng.integers(lo, hi, size=(64, 64), dtype=np.uint8)
            Image.fromarray(arr, mode="L").save(cls / f"{i}.png")
    return root


@pytest.fixture(scope="session")
def split_dir(tmp_path_factory, texture_pool):
    """16-pair 64x64 split generated through the CLI, plus a few-shot plan."""
    out = tmp_path_factory.mktemp("split")
    run_generator(
        "generate",
        "--count", "16",
        "--seed", "3",
        "--width", "64",
        "--height", "64",
        "--texture-root", str(texture_pool),
        "--out", str(out),
    )
    run_generator(
        "plan-fewshot",
        "--pool", str(out / "manifest.jsonl"),
        "--sizes", "1,2,4,16",
        "--runs", "2",
        "--seed", "5",
        "--out", str(out / "plan.jsonl"),
    )
    return out


@pytest.fixture(scope="session")
def plan_entries(split_dir):
    with open(split_dir / "plan.jsonl") as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    assert lines[0]["kind"] == "fewshot-plan"
    return lines[1:]
