"""train_bridge: consumes generated dataset manifests and few-shot plans for
smoke-scale segmentation fine-tuning."""

from .dataset import ManifestDataset, load_pairs
from .finetune import smoke_finetune

__version__ = "0.1.0"
