"""Command-line front end: ``detect``, ``eval``, ``gen`` and ``build-assets``.

Exit codes: 0 on success, 1 when work failed (every input of ``detect``
unreadable, I/O errors), 2 for invalid configuration or usage.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, PipelineConfig, load_config
from .evaluation import SceneMismatchError, evaluate, load_detections
from .imgcore import read_image
from .models import AssetError, build_assets, save_assets
from .pipeline import TargetDetector
from .synthgen import generate_dataset, load_manifests

log = logging.getLogger("aerotarget")

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def write_json(path, obj) -> None:
    """UTF-8 JSON with sorted keys, written to a temp file and renamed."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)


def collect_images(inputs) -> list[Path]:
    """Image files named directly or found in the given directories.

    A dataset root is searched through its ``scenes`` subdirectory.
    """
    found = []
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            if (p / "scenes").is_dir():
                p = p / "scenes"
            found.extend(sorted(f for f in p.iterdir() if f.suffix.lower() in IMAGE_SUFFIXES))
        else:
            found.append(p)
    return found


_worker: TargetDetector | None = None


def _init_worker(cfg: PipelineConfig, seed: int) -> None:
    global _worker
    _worker = TargetDetector(cfg, seed=seed).fit()


def _detect_one(args) -> tuple[str, str | None]:
    path, out_dir, debug = args
    scene = path.stem
    try:
        image = read_image(path)
    except (OSError, ValueError) as exc:
        return scene, f"cannot read {path}: {exc}"
    debug_dir = Path(out_dir) / "debug" / scene if debug else None
    reports = _worker.detect(image, debug_dir=debug_dir)
    write_json(Path(out_dir) / f"{scene}.json", {"scene": scene, "targets": [r.to_dict() for r in reports]})
    return scene, None


def cmd_detect(args, cfg: PipelineConfig) -> int:
    images = collect_images(args.inputs)
    if not images:
        log.error("no input images found")
        return EXIT_USAGE
    out = Path(args.out or "detections")
    out.mkdir(parents=True, exist_ok=True)
    seed = args.seed if args.seed is not None else cfg.seed
    debug = args.debug_masks or cfg.debug.masks
    work = [(p, out, debug) for p in images]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs, initializer=_init_worker, initargs=(cfg, seed)) as pool:
            results = list(pool.map(_detect_one, work))
    else:
        _init_worker(cfg, seed)
        results = [_detect_one(w) for w in work]
    errors = {scene: msg for scene, msg in results if msg is not None}
    for scene, msg in sorted(errors.items()):
        log.error(msg)
    if errors:
        write_json(out / "errors.json", {"errors": errors})
    elif (out / "errors.json").exists():
        (out / "errors.json").unlink()
    log.info("processed %d image(s), %d failed", len(results), len(errors))
    return EXIT_FAILED if len(errors) == len(results) else EXIT_OK


def cmd_eval(args, cfg: PipelineConfig) -> int:
    try:
        summary = evaluate(load_detections(args.detections), load_manifests(args.manifests))
    except SceneMismatchError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    doc = summary.to_dict()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "eval.json", doc)
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_gen(args, cfg: PipelineConfig) -> int:
    gen = cfg.gen
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.n_scenes is not None:
        changes["n_scenes"] = args.n_scenes
    if args.targets_per_scene is not None:
        changes["targets_per_scene"] = args.targets_per_scene
    try:
        gen = replace(gen, **changes)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    index = generate_dataset(gen, args.out or "dataset", jobs=args.jobs)
    log.info("wrote %d scene(s) to %s", len(index.scenes), args.out or "dataset")
    return EXIT_OK


def cmd_build_assets(args, cfg: PipelineConfig) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    out = Path(args.out or "assets.bin")
    save_assets(build_assets(seed), out)
    log.info("wrote %s", out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config (default: $AEROTARGET_CONFIG)")
    common.add_argument("--out", help="output directory (file for build-assets)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="aerotarget", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", parents=[common], help="detect targets in images")
    p.add_argument("inputs", nargs="+", help="image files or directories")
    p.add_argument("--debug-masks", action="store_true", help="dump crops, masks and overlays")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", parents=[common], help="score detections against manifests")
    p.add_argument("detections", help="directory written by detect")
    p.add_argument("manifests", help="dataset root or its scenes directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--n-scenes", type=int)
    p.add_argument("--targets-per-scene", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build-assets", parents=[common], help="rebuild the classifier asset file")
    p.set_defaults(func=cmd_build_assets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.seed is not None and args.seed < 0:
        parser.error("--seed must be non-negative")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (ConfigError, AssetError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
