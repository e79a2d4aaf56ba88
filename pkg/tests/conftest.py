import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


@pytest.fixture
def texture_pool_root(tmp_path):
    """Tiny class-organized pool: 2 classes, small distinct images."""
    rng = np.random.default_rng(99)
    for cls, count in (("alpha", 3), ("beta", 2)):
        d = tmp_path / "pool" / cls
        d.mkdir(parents=True)
        for i in range(count):
            arr = rng.integers(0, 256, size=(24, 32, 3), dtype=np.uint8)
            Image.fromarray(arr).save(d / f"img_{i}.png")
    return tmp_path / "pool"
