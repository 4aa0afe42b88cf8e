"""Command line entry point.

Subcommands:
  synth             generate a synthetic world and/or emulated detections
  simulate-regions  build noisy radio regions from ground-truth boxes
  localize          CSI frames -> per-image people estimates
  project           estimates -> image-plane regions via the camera model
  run               execute one method end to end and write metrics
  sweep             re-run a method across a localization-error parameter

Every subcommand accepts ``--config config.json`` plus a few common
overrides; flags win over the config file. File formats are documented in
docs/SCHEMAS.md.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

from . import fileio, pipeline
from .config import METHODS, RunConfig
from .errors import SchemaError, InvalidInputError
from .sim_regions import build_simulative_set
from .synth import make_world, generate as synth_generate


def _load_config(args) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        config = replace(config, seed=args.seed)
    if getattr(args, "method", None) is not None:
        config = replace(config, method=args.method)
    if getattr(args, "lam", None) is not None:
        config = replace(config, lam=args.lam)
    if getattr(args, "sigma", None) is not None:
        config = replace(config, noise=replace(config.noise, sigma=args.sigma))
    if getattr(args, "k", None) is not None:
        config = replace(config, noise=replace(config.noise, k1=args.k, k2=args.k))
    if getattr(args, "iou_threshold", None) is not None:
        config = replace(config, nms=replace(config.nms, iou_threshold=args.iou_threshold))
    if getattr(args, "score_threshold", None) is not None:
        config = replace(config, score_threshold=args.score_threshold)
    paths = config.paths
    for field in ("annotations", "detections", "regions", "output_dir"):
        value = getattr(args, field, None)
        if value is not None:
            paths = replace(paths, **{field: value})
    return replace(config, paths=paths)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="run configuration JSON")
    parser.add_argument("--seed", type=int, help="override the run seed")
    parser.add_argument("--output-dir", dest="output_dir", help="output directory")


def cmd_synth(args) -> int:
    config = _load_config(args)
    out = Path(config.paths.output_dir)
    if args.annotations:
        image_ids, gts = pipeline.load_world(config)
    else:
        image_ids, gts = make_world(
            num_images=args.num_images,
            image_size=config.image_size,
            seed=config.substream_seed("world"),
        )
        fileio.write_annotations(out / "annotations.json", image_ids, gts,
                                 image_size=config.image_size)
        print(f"wrote {out / 'annotations.json'} ({len(gts)} people, {len(image_ids)} images)")
    synth = replace(config.synth, seed=config.substream_seed("synth"))
    detections = synth_generate(gts, synth, image_size=config.image_size,
                                image_ids=image_ids)
    fileio.write_detections(out / "detections.json", detections)
    print(f"wrote {out / 'detections.json'} ({len(detections)} detections)")
    return 0


def cmd_simulate_regions(args) -> int:
    config = _load_config(args)
    _, gts = pipeline.load_world(config)
    noise = replace(config.noise, seed=config.substream_seed("regions"))
    regions = build_simulative_set(gts, noise)
    out = args.out or str(Path(config.paths.output_dir) / "regions.json")
    fileio.write_regions(out, regions)
    total = sum(len(v) for v in regions.values())
    print(f"wrote {out} ({total} regions over {len(regions)} images)")
    return 0


def cmd_localize(args) -> int:
    config = _load_config(args)
    frames = [fileio.read_csi_frame(path) for path in args.csi]
    estimates = pipeline.localize_frames(frames, config.radio)
    out = args.out or str(Path(config.paths.output_dir) / "estimates.json")
    fileio.write_estimates(out, estimates)
    total = sum(len(v) for v in estimates.values())
    print(f"wrote {out} ({total} estimates over {len(estimates)} images)")
    return 0


def cmd_project(args) -> int:
    config = _load_config(args)
    estimates = fileio.read_estimates(args.estimates)
    regions = pipeline.project_estimates(estimates, config.camera, config.radio)
    out = args.out or str(Path(config.paths.output_dir) / "regions.json")
    fileio.write_regions(out, regions)
    total = sum(len(v) for v in regions.values())
    print(f"wrote {out} ({total} regions over {len(regions)} images)")
    return 0


def cmd_run(args) -> int:
    config = _load_config(args)
    report, display = pipeline.run(config)
    print(f"method={config.method} images_dir={config.paths.output_dir}")
    print(f"  AP={report.ap:.4f} AP50={report.ap50:.4f} AP75={report.ap75:.4f}")
    print(f"  log-avg miss rate={report.log_avg_miss_rate:.4f}")
    print(f"  FP&FN per image={report.fp_fn_per_image:.4f} "
          f"true detection ratio={report.true_detection_ratio:.4f}")
    print(f"  detections shown={len(display)} runtime={report.runtime_s:.2f}s")
    return 0


def cmd_sweep(args) -> int:
    config = _load_config(args)
    rows = pipeline.sweep(config, args.param, args.values)
    out = args.out or str(Path(config.paths.output_dir) / f"sweep_{args.param}.csv")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radiofusion",
        description="Radio-region assisted detection post-processing toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic world and detections")
    _add_common(p)
    p.add_argument("--annotations", help="reuse an existing annotation file")
    p.add_argument("--num-images", type=int, default=100,
                   help="world size when generating annotations")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate-regions", help="noisy regions from ground truth")
    _add_common(p)
    p.add_argument("--annotations", help="annotation file (overrides config)")
    p.add_argument("--sigma", type=float, help="edge scale noise std")
    p.add_argument("--k", type=float, help="center shift noise factor (k1 = k2)")
    p.add_argument("--out", help="output regions file")
    p.set_defaults(func=cmd_simulate_regions)

    p = sub.add_parser("localize", help="estimate people from CSI frames")
    _add_common(p)
    p.add_argument("--csi", nargs="+", required=True, help="CSI frame files")
    p.add_argument("--out", help="output estimates file")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("project", help="project estimates to image regions")
    _add_common(p)
    p.add_argument("--estimates", required=True, help="estimates file")
    p.add_argument("--out", help="output regions file")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("run", help="run one method end to end")
    _add_common(p)
    p.add_argument("--annotations", help="annotation file (overrides config)")
    p.add_argument("--detections", help="detections file (overrides config)")
    p.add_argument("--regions", help="regions file (overrides config)")
    p.add_argument("--method", choices=METHODS, help="pipeline method")
    p.add_argument("--lam", type=float, help="radio trust weight in [0, 1]")
    p.add_argument("--sigma", type=float, help="edge scale noise std")
    p.add_argument("--k", type=float, help="center shift noise factor (k1 = k2)")
    p.add_argument("--iou-threshold", dest="iou_threshold", type=float,
                   help="NMS IoU threshold")
    p.add_argument("--score-threshold", dest="score_threshold", type=float,
                   help="display confidence threshold for non-constrained methods")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep a localization-error parameter")
    _add_common(p)
    p.add_argument("--annotations", help="annotation file (overrides config)")
    p.add_argument("--detections", help="detections file (overrides config)")
    p.add_argument("--method", choices=METHODS, help="pipeline method")
    p.add_argument("--param", required=True, choices=pipeline.SWEEP_PARAMS)
    p.add_argument("--values", nargs="+", type=float, required=True)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, InvalidInputError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
