"""Thin CLI: pick a plan entry, fine-tune, write predictions.

Scoring stays with the generator's `eval` subcommand; this tool only
produces artifacts that `eval` consumes."""

from __future__ import annotations

import argparse
import json
import sys

from .dataset import DigestMismatchError
from .finetune import SmokeFailure, smoke_finetune


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="train-bridge")
    parser.add_argument("--manifest", required=True, help="dataset manifest.jsonl")
    parser.add_argument("--plan", required=True, help="few-shot plan JSONL")
    parser.add_argument("--entry", type=int, default=0, help="plan entry index (manifest order)")
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--lr", type=float, default=1e-2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="predictions", help="directory for {0,255} prediction PNGs")
    args = parser.parse_args(argv)

    with open(args.plan) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("kind") != "fewshot-plan":
        print(f"error: not a few-shot plan: {args.plan}", file=sys.stderr)
        return 1
    entries = lines[1:]
    if not 0 <= args.entry < len(entries):
        print(f"error: entry {args.entry} out of range (plan has {len(entries)})", file=sys.stderr)
        return 1

    try:
        result = smoke_finetune(
            args.manifest,
            entries[args.entry],
            epochs=args.epochs,
            out_dir=args.out,
            lr=args.lr,
            seed=args.seed,
        )
    except (DigestMismatchError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SmokeFailure as exc:
        print(f"smoke failure: {exc}", file=sys.stderr)
        return 2

    print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
