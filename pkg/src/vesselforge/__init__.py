"""vesselforge: deterministic synthetic vessel-segmentation data tools."""

from .geometry import BezierCurve, CurveParams, evaluate, evaluate_many, sample_curve, discretize
from .raster import rasterize_polyline, dilate_disk, build_mask
from .compositor import make_matte, blend
from .texture import open_pool, draw_texture_pair, procedural_fallback
from .pipeline import GenerationParams, generate_sample, generate_split, stream_samples, bench
from .metrics import confusion, compute_metrics, evaluate_dirs
from .fewshot import FewShotConfig, build_plan, plan_to_manifest, coverage_report

__version__ = "0.1.0"
