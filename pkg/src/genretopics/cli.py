"""Command-line pipeline driver.

Stage subcommands re-run exactly the stages whose inputs changed; flags
override config-file values, which override built-in defaults. Exit
code 0 on success, 2 with a stage-tagged message on pipeline failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import GenreTopicsError
from .mfcc import MfccConfig
from .pipeline import (
    DEFAULT_BUCKETS,
    RunConfig,
    STAGES,
    load_manifest,
    run_all,
    save_manifest,
    scan_dataset,
)
from .synth import generate_fixture

CONFIG_FIELDS = (
    "clip_seconds",
    "codebook_size",
    "topic_counts",
    "report_topics",
    "alpha",
    "eta",
    "n_iters",
    "burn_in",
    "foldin_iters",
    "train_fraction",
    "epochs",
    "lam",
    "timeline_window",
    "seed",
    "out",
)


def _parse_topics(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated int list: {text!r}")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", type=Path, help="dataset root or manifest JSON")
    p.add_argument("--config", type=Path, help="TOML or JSON config file")
    p.add_argument("--out", type=Path, help="artifact directory (default out)")
    p.add_argument("--clip-seconds", type=float, dest="clip_seconds")
    p.add_argument("--codebook-size", type=int, dest="codebook_size")
    p.add_argument("--topics", type=_parse_topics, dest="topic_counts",
                   help="topic counts to sweep, e.g. 2,3,4,5")
    p.add_argument("--report-topics", type=int, dest="report_topics",
                   help="topic count used for the report and charts")
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--iters", type=int, dest="n_iters")
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--foldin-iters", type=int, dest="foldin_iters")
    p.add_argument("--train-fraction", type=float, dest="train_fraction")
    p.add_argument("--epochs", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--timeline-window", type=int, dest="timeline_window")
    p.add_argument("--seed", type=int)
    p.add_argument("--bucket", type=int, action="append", choices=[1, 2, 3],
                   help="restrict to one bucket (repeatable; default: all that fit)")
    p.add_argument("--force", action="store_true",
                   help="recompute this command's stage even if its stamp is current")


def _load_config_file(path: Path) -> dict:
    text = path.read_text()
    if path.suffix == ".toml":
        return tomllib.loads(text)
    if path.suffix == ".json":
        return json.loads(text)
    raise ValueError(f"config file must be .toml or .json, got {path.name}")


def _build_config(args: argparse.Namespace) -> tuple[RunConfig, Path | None]:
    file_cfg: dict = {}
    if args.config:
        file_cfg = _load_config_file(args.config)

    merged: dict = {}
    for key in CONFIG_FIELDS:
        if key in file_cfg:
            merged[key] = file_cfg[key]
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            merged[key] = flag_val
    if "topic_counts" in merged:
        merged["topic_counts"] = tuple(int(t) for t in merged["topic_counts"])
    if "out" in merged:
        merged["out"] = Path(merged["out"])
    if isinstance(file_cfg.get("mfcc"), dict):
        merged["mfcc"] = MfccConfig(**file_cfg["mfcc"])

    data = args.data if args.data is not None else file_cfg.get("data")
    return RunConfig(**merged), Path(data) if data else None


def _resolve_manifest(config: RunConfig, data: Path | None):
    if data is not None:
        return scan_dataset(data)
    stored = config.out / "manifest.json"
    if stored.is_file():
        return load_manifest(stored)
    raise GenreTopicsError(
        "no dataset given: pass --data or run `scan` into this artifact directory first"
    )


def _selected_buckets(args: argparse.Namespace):
    if getattr(args, "bucket", None):
        wanted = sorted(set(args.bucket))
        return [b for b in DEFAULT_BUCKETS if b.bucket_id in wanted]
    return None


def _cmd_scan(args: argparse.Namespace) -> int:
    config, data = _build_config(args)
    if data is None:
        raise GenreTopicsError("scan needs --data (dataset root or manifest JSON)")
    manifest = scan_dataset(data)
    config.out.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, config.out / "manifest.json")
    genres = ", ".join(sorted(manifest.genres()))
    print(f"{len(manifest.entries)} songs across genres: {genres}")
    print(f"manifest written to {config.out / 'manifest.json'}")
    return 0


def _cmd_stage(stage: str, args: argparse.Namespace) -> int:
    config, data = _build_config(args)
    manifest = _resolve_manifest(config, data)
    force = [stage] if args.force else []
    summary = run_all(
        manifest,
        config,
        buckets=_selected_buckets(args),
        through=stage,
        force=force,
    )
    for b in summary["buckets"]:
        ran = ", ".join(b["ran"]) or "nothing (all stages current)"
        print(f"bucket {b['bucket_id']}: ran {ran} -> {b['dir']}")
    return 0


def _cmd_fixture(args: argparse.Namespace) -> int:
    written = generate_fixture(args.out, seed=args.seed)
    print(f"wrote {len(written)} songs under {args.out}")
    for song_id, rel, genre in written:
        print(f"  {genre:<6} {rel}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genretopics",
        description="Acoustic topic models over genre-labeled songs: "
        "clips to words to topics to genre mixtures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="index the dataset into a manifest")
    _add_run_options(p_scan)
    p_scan.set_defaults(func=_cmd_scan)

    stage_help = {
        "features": "decode, clip, and extract MFCC features",
        "vocab": "fit the k-means codebook and tokenize songs",
        "train": "train topic models and fold in test documents",
        "eval": "train classifiers and write the accuracy table",
        "interpret": "compute genre profiles and the bucket report",
        "viz": "render doughnut and timeline SVGs",
    }
    for stage in STAGES:
        p = sub.add_parser(stage, help=stage_help[stage])
        _add_run_options(p)
        p.set_defaults(func=lambda a, s=stage: _cmd_stage(s, a))

    p_run = sub.add_parser("run-all", help="run every stage end to end")
    _add_run_options(p_run)
    p_run.set_defaults(func=lambda a: _cmd_stage("viz", a))

    p_fix = sub.add_parser(
        "fixture", help="write the bundled 9-song synthetic dataset"
    )
    p_fix.add_argument("--out", type=Path, required=True, help="dataset directory")
    p_fix.add_argument("--seed", type=int, default=0)
    p_fix.set_defaults(func=_cmd_fixture)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GenreTopicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
