"""Progressive few-shot sampling schedules.

For each sample size n, R independent runs each draw an n-image training
subset from the pool, preferring images not yet used at that size; once the
pool is exhausted at a size, eligibility resets and repetition across runs is
allowed (never within a subset). Each (n, r) entry carries S derived seeds for
repeated fine-tuning, and an optional zero-shot entry (n=0, empty subset)
covers inference-only evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Preset split conventions: (train pool size, val size, test size, sample sizes).
PRESETS = {
    "drive": {
        "train": 16,
        "val": 4,
        "test": 20,
        "sizes": (1, 2, 4, 6, 8, 10, 12, 14, 16),
    },
    "vessmap": {
        "train": 60,
        "val": 20,
        "test": 20,
        "sizes": (1, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20),
    },
}

DEFAULT_RUNS = 5
DEFAULT_REPEATS = 3


@dataclass(frozen=True)
class FewShotConfig:
    pool: tuple[str, ...]  # ordered sample ids
    sample_sizes: tuple[int, ...]
    runs: int = DEFAULT_RUNS
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    include_zero_shot: bool = True

    def __post_init__(self):
        if len(self.pool) != len(set(self.pool)):
            raise ValueError("pool ids must be unique")
        if not self.sample_sizes:
            raise ValueError("sample_sizes must be non-empty")
        sizes = self.sample_sizes
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample_sizes must be strictly increasing")
        if sizes[0] != 1:
            raise ValueError("the first sample size must be 1")
        if sizes[-1] != len(self.pool):
            raise ValueError(
                f"the last sample size must equal the pool size "
                f"({sizes[-1]} vs {len(self.pool)})"
            )
        if self.runs < 1 or self.repeats < 1:
            raise ValueError("runs and repeats must be >= 1")


@dataclass(frozen=True)
class PlanEntry:
    n: int
    run: int
    subset: tuple[str, ...]
    repeat_seeds: tuple[int, ...]


@dataclass
class FewShotPlan:
    config: FewShotConfig
    entries: list[PlanEntry]
    zero_shot: PlanEntry | None = None


def _repeat_seeds(config: FewShotConfig, n: int, run: int) -> tuple[int, ...]:
    return tuple(
        int(np.random.SeedSequence([config.seed, n, run, s]).generate_state(1, np.uint64)[0])
        for s in range(1, config.repeats + 1)
    )


def build_plan(config: FewShotConfig) -> FewShotPlan:
    """Build the full (n, r) schedule with unused-first subset sampling."""
    rng = np.random.default_rng(np.random.SeedSequence([config.seed]))
    pool = list(config.pool)
    entries: list[PlanEntry] = []
    for n in config.sample_sizes:
        used: set[str] = set()
        for run in range(1, config.runs + 1):
            subset: list[str] = []
            while len(subset) < n:
                eligible = [i for i in pool if i not in used and i not in subset]
                if not eligible:
                    used = set()  # pool exhausted at this size: repetition allowed
                    eligible = [i for i in pool if i not in subset]
                take = min(n - len(subset), len(eligible))
                picked = rng.choice(len(eligible), size=take, replace=False)
                for idx in sorted(int(i) for i in picked):
                    subset.append(eligible[idx])
                    used.add(eligible[idx])
            entries.append(
                PlanEntry(n=n, run=run, subset=tuple(subset), repeat_seeds=_repeat_seeds(config, n, run))
            )
    zero = None
    if config.include_zero_shot:
        zero = PlanEntry(n=0, run=0, subset=(), repeat_seeds=())
    return FewShotPlan(config=config, entries=entries, zero_shot=zero)


def plan_to_manifest(plan: FewShotPlan, path: str | Path) -> None:
    """Write the plan as JSONL: a config header, then one record per entry.

    Byte output is deterministic for a fixed config."""
    cfg = plan.config
    header = {
        "kind": "fewshot-plan",
        "pool": list(cfg.pool),
        "sample_sizes": list(cfg.sample_sizes),
        "runs": cfg.runs,
        "repeats": cfg.repeats,
        "seed": cfg.seed,
        "include_zero_shot": cfg.include_zero_shot,
    }
    all_entries = list(plan.entries) + ([plan.zero_shot] if plan.zero_shot else [])
    with open(path, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for e in all_entries:
            fh.write(
                json.dumps(
                    {"n": e.n, "run": e.run, "subset": list(e.subset), "repeat_seeds": list(e.repeat_seeds)},
                    sort_keys=True,
                )
                + "\n"
            )


def read_plan_manifest(path: str | Path) -> tuple[dict, list[dict]]:
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("kind") != "fewshot-plan":
        raise ValueError(f"not a few-shot plan manifest: {path}")
    return lines[0], lines[1:]


def coverage_report(plan: FewShotPlan) -> dict:
    """Per sample size: distinct pool ids touched and the first run at which a
    previously-used id was drawn again (None when no repetition occurred)."""
    report = {}
    for n in plan.config.sample_sizes:
        seen: set[str] = set()
        first_repeat = None
        distinct = set()
        for e in (e for e in plan.entries if e.n == n):
            if first_repeat is None and any(i in seen for i in e.subset):
                first_repeat = e.run
            seen.update(e.subset)
            distinct.update(e.subset)
        report[n] = {"distinct_ids": len(distinct), "first_repeat_run": first_repeat}
    return report
