"""Command line: ``eigenweight <task> --config <path> [--out <dir>]``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .artifacts import summary_value
from .config import TASKS, ConfigError, parse_config
from .runner import run
from .validate import validate_suite


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eigenweight", description="Principal eigenvalue optimization over rearrangement classes.")
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", type=Path, help="flat key = value configuration (optional for validate)")
    p.add_argument("--out", type=Path, help="output directory, overrides output_dir")
    p.add_argument("--seed", type=int, default=0, help="seed for validate without a config")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.task == "validate" and args.config is None:
        report = validate_suite(seed=args.seed)
        print("\n".join(report.lines()))
        return 0 if report.passed else 1
    if args.config is None:
        print(f"eigenweight {args.task}: --config is required", file=sys.stderr)
        return 2
    try:
        text = args.config.read_text(encoding="utf-8")
        cfg = parse_config(text, base_dir=args.config.parent, overrides={"task": args.task})
    except (OSError, ConfigError) as exc:
        print(f"eigenweight: {exc}", file=sys.stderr)
        return 2
    outcome = run(cfg, args.out)
    for k, v in outcome.summary.items():
        print(f"{k}={summary_value(v)}")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
