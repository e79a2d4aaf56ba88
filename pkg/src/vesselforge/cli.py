"""Command-line entry point: generate, preview, bench, eval, plan-fewshot.

Config precedence: built-in defaults < JSON config file < explicit flags.
Exit codes: 0 success, 1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np
from PIL import Image

from . import compositor, fewshot, metrics, pipeline, texture

EXIT_CONFIG = 1
EXIT_IO = 2


def _build_params(config: str | None, **overrides) -> pipeline.GenerationParams:
    base = pipeline.GenerationParams().to_dict()
    if config:
        try:
            base.update(json.loads(Path(config).read_text()))
        except OSError as exc:
            raise click.exceptions.Exit(EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            click.echo(f"error: invalid config file: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_CONFIG) from exc
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    try:
        return pipeline.GenerationParams.from_dict(base)
    except (ValueError, TypeError) as exc:
        click.echo(f"error: invalid parameters: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc


def _texture_overrides(texture_root: str | None, procedural: str | None) -> dict:
    over: dict = {}
    if texture_root:
        over["texture_mode"] = "pool"
        over["texture_root"] = texture_root
    elif procedural:
        over["texture_mode"] = "procedural"
        over["procedural_kind"] = procedural
    return over


def _common_param_options(fn):
    fn = click.option("--config", type=click.Path(), help="JSON file mirroring GenerationParams.")(fn)
    fn = click.option("--seed", type=int, help="Master seed.")(fn)
    fn = click.option("--width", type=int, help="Image width in px.")(fn)
    fn = click.option("--height", type=int, help="Image height in px.")(fn)
    fn = click.option("--channels", type=click.Choice(["1", "3"]), help="Channels per image.")(fn)
    fn = click.option("--texture-root", type=click.Path(), help="Class-organized texture pool root.")(fn)
    fn = click.option(
        "--procedural",
        type=click.Choice(list(texture.PROCEDURAL_KINDS)),
        help="Procedural texture kind (no pool needed).",
    )(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Verbose output.")
@click.pass_context
def main(ctx, verbose):
    """Synthetic vessel-segmentation dataset tools."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@main.command()
@_common_param_options
@click.option("--count", type=int, required=True, help="Number of pairs to generate.")
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--workers", type=int, default=1, show_default=True)
def generate(config, seed, width, height, channels, texture_root, procedural, count, out_dir, workers):
    """Generate an on-disk split: images/, masks/ and manifest.jsonl."""
    if count < 1:
        click.echo("error: --count must be >= 1", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG)
    params = _build_params(
        config,
        master_seed=seed,
        image_width=width,
        image_height=height,
        channels=int(channels) if channels else None,
        **_texture_overrides(texture_root, procedural),
    )
    try:
        manifest = pipeline.generate_split(params, count, out_dir, workers=workers)
    except OSError as exc:
        click.echo(f"error: I/O failure: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_IO) from exc
    digest = pipeline.manifest_digest(manifest["records"])
    click.echo(f"manifest: {manifest['path']}")
    click.echo(f"samples: {len(manifest['records'])}")
    click.echo(f"digest: {digest}")


@main.command()
@_common_param_options
@click.option("--n", "num", type=int, default=4, show_default=True, help="Samples on the sheet.")
@click.option("--out", "out_path", type=click.Path(), default="preview.png", show_default=True)
def preview(config, seed, width, height, channels, texture_root, procedural, num, out_path):
    """Write an n x 3 contact sheet: mask, matte, composite per row."""
    if num < 1:
        click.echo("error: --n must be >= 1", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG)
    params = _build_params(
        config,
        master_seed=seed,
        image_width=width,
        image_height=height,
        channels=int(channels) if channels else None,
        **_texture_overrides(texture_root, procedural),
    )
    rows = []
    for i in range(num):
        pair = pipeline.generate_sample(params, i)
        matte = compositor.make_matte(pair.mask, pair.params_used.sigma)
        panels = [
            (pair.mask * 255).astype(np.uint8),
            np.floor(matte * 255 + 0.5).astype(np.uint8),
            pair.image,
        ]
        panels = [p if p.ndim == 3 else np.repeat(p[:, :, None], 3, axis=2) for p in panels]
        rows.append(np.concatenate(panels, axis=1))
    sheet = np.concatenate(rows, axis=0)
    try:
        Image.fromarray(sheet).save(out_path)
    except OSError as exc:
        click.echo(f"error: I/O failure: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_IO) from exc
    click.echo(f"wrote {out_path}")


@main.command()
@_common_param_options
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--json", "json_out", type=click.Path(), help="Write the report as JSON.")
def bench(config, seed, width, height, channels, texture_root, procedural, count, json_out):
    """Measure generation throughput: per-stage timings and worker scaling."""
    params = _build_params(
        config,
        master_seed=seed,
        image_width=width,
        image_height=height,
        channels=int(channels) if channels else None,
        **_texture_overrides(texture_root, procedural),
    )
    try:
        report = pipeline.bench(params, count)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc
    click.echo(f"samples/sec (sequential): {report['samples_per_second']:.1f}")
    for stage, secs in report["stage_seconds"].items():
        click.echo(f"  {stage:<10} {secs:.3f} s")
    for w, rate in report["workers_samples_per_second"].items():
        click.echo(f"workers={w}: {rate:.1f} samples/sec")
    if json_out:
        Path(json_out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")


@main.command("eval")
@click.option("--pred", "pred_dir", type=click.Path(exists=True), required=True)
@click.option("--gt", "gt_dir", type=click.Path(exists=True), required=True)
@click.option("--json", "json_out", type=click.Path(), help="Write the report as JSON.")
def eval_cmd(pred_dir, gt_dir, json_out):
    """Evaluate predicted masks against ground truth by matching filenames."""
    report = metrics.evaluate_dirs(pred_dir, gt_dir)
    click.echo(metrics.format_table(report))
    if json_out:
        metrics.write_json(report, json_out)
    if report["missing"]:
        raise click.exceptions.Exit(EXIT_CONFIG)


def _pool_ids(pool_arg: str | None, preset: str | None) -> list[str]:
    if pool_arg:
        path = Path(pool_arg)
        if path.is_file():
            _, records = pipeline.read_manifest(path)
            return [str(rec["index"]) for rec in records]
        if path.is_dir():
            return sorted(p.stem for p in path.iterdir() if p.is_file())
        raise click.exceptions.Exit(EXIT_CONFIG)
    if preset:
        size = fewshot.PRESETS[preset]["train"]
        return [f"{preset}_train_{i:02d}" for i in range(size)]
    click.echo("error: provide --pool or --preset", err=True)
    raise click.exceptions.Exit(EXIT_CONFIG)


@main.command("plan-fewshot")
@click.option("--pool", type=click.Path(), help="Manifest file or directory supplying sample ids.")
@click.option("--preset", type=click.Choice(sorted(fewshot.PRESETS)), help="Named split preset.")
@click.option("--sizes", help="Comma-separated sample sizes, e.g. 1,2,4,8.")
@click.option("--runs", type=int, default=fewshot.DEFAULT_RUNS, show_default=True)
@click.option("--repeats", type=int, default=fewshot.DEFAULT_REPEATS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--zero-shot/--no-zero-shot", default=True, show_default=True)
@click.option("--out", "out_path", type=click.Path(), help="Write the plan JSONL here.")
@click.option("--json", "json_summary", is_flag=True, help="Print a JSON summary.")
def plan_fewshot(pool, preset, sizes, runs, repeats, seed, zero_shot, out_path, json_summary):
    """Emit the progressive few-shot sampling schedule."""
    ids = _pool_ids(pool, preset)
    if sizes:
        size_list = tuple(int(s) for s in sizes.split(","))
    elif preset:
        size_list = tuple(fewshot.PRESETS[preset]["sizes"])
    else:
        click.echo("error: provide --sizes or --preset", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG)
    try:
        config = fewshot.FewShotConfig(
            pool=tuple(ids),
            sample_sizes=size_list,
            runs=runs,
            repeats=repeats,
            seed=seed,
            include_zero_shot=zero_shot,
        )
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        raise click.exceptions.Exit(EXIT_CONFIG) from exc
    plan = fewshot.build_plan(config)
    if out_path:
        try:
            fewshot.plan_to_manifest(plan, out_path)
        except OSError as exc:
            click.echo(f"error: I/O failure: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_IO) from exc
    summary = {
        "entries": len(plan.entries),
        "zero_shot": plan.zero_shot is not None,
        "coverage": {str(k): v for k, v in fewshot.coverage_report(plan).items()},
    }
    if json_summary:
        click.echo(json.dumps(summary, indent=2, sort_keys=True))
    else:
        click.echo(f"entries: {summary['entries']}" + (" (+ zero-shot)" if summary["zero_shot"] else ""))
        if out_path:
            click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
