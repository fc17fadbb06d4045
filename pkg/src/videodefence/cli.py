"""Command-line front end.

Subcommands::

    videodefence synth --spec scene.cfg --out DIR
    videodefence refine-masks --frames DIR --soft-masks DIR --out DIR
    videodefence defence --frames DIR --soft-masks DIR --out DIR [--target I]
    videodefence eval --result DIR --truth DIR --masks DIR

Exit status is 0 on success, 1 on a runtime failure and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .core import FenceMask
from .errors import DefenceError
from .mask_refine import RefineParams
from .metrics import format_records, mask_prf, psnr
from .optical_flow import FlowParams
from .synth import generate_scene
from .tv_fusion.fuse import FusionParams
from .tv_fusion.pipeline import defence_frame_detailed, refine_sequence_mask

log = logging.getLogger("videodefence")


def _add_refine_flags(p):
    p.add_argument("--m", type=int, default=None, help="neighbouring masks used for refinement (default 5)")
    p.add_argument("--mu", type=float, default=None, help="threshold on the averaged scores (default 0.5)")
    p.add_argument("--close-radius", type=int, default=None, help="closing disk radius (default 1)")
    p.add_argument("--register-on", choices=("masks", "frames"), default="masks",
                   help="layer used for phase-correlation registration")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="videodefence", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("refine-masks", help="temporally refine per-frame fence masks")
    p.add_argument("--frames", required=True, type=Path)
    p.add_argument("--soft-masks", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    _add_refine_flags(p)

    p = sub.add_parser("defence", help="remove the fence from a frame sequence")
    p.add_argument("--frames", required=True, type=Path)
    p.add_argument("--soft-masks", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--config", type=Path, help="key = value pipeline configuration")
    p.add_argument("--n", type=int, default=None, help="neighbour frames fused (default 6)")
    p.add_argument("--lambda-flow", type=float, default=None, help="flow smoothness weight (default 0.0005)")
    p.add_argument("--lambda-fusion", type=float, default=None, help="fusion TV weight (default 0.0005)")
    p.add_argument("--target", type=int, default=None, help="process only this frame index")
    p.add_argument("--save-masks", action="store_true", help="also write refined masks")
    _add_refine_flags(p)

    p = sub.add_parser("synth", help="render a synthetic fenced sequence")
    p.add_argument("--spec", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("eval", help="score results against ground truth")
    p.add_argument("--result", required=True, type=Path)
    p.add_argument("--truth", required=True, type=Path)
    p.add_argument("--masks", required=True, type=Path, help="ground-truth fence masks")
    p.add_argument("--predicted-masks", type=Path, help="predicted masks scored against --masks")
    return parser


def _params(args):
    refine, flow, fusion = (io.load_pipeline_config(args.config) if getattr(args, "config", None)
                            else (RefineParams(), FlowParams(), FusionParams()))
    overrides = {"m": args.m, "mu": args.mu, "close_radius": args.close_radius}
    refine = dataclasses.replace(refine, **{k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "lambda_flow", None) is not None:
        flow = dataclasses.replace(flow, lam=args.lambda_flow)
    if getattr(args, "n", None) is not None:
        fusion = dataclasses.replace(fusion, n=args.n)
    if getattr(args, "lambda_fusion", None) is not None:
        fusion = dataclasses.replace(fusion, lambda_fusion=args.lambda_fusion)
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    return refine, flow, fusion


def _load_inputs(args):
    frames = io.load_sequence(args.frames)
    softs = io.load_mask_sequence(args.soft_masks, soft=True)
    if len(frames) != len(softs):
        raise DefenceError(f"{len(frames)} frames but {len(softs)} masks")
    return frames, softs


def _map(fn, items, jobs):
    if jobs == 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class _RefineJob:
    def __init__(self, frames, softs, refine, register_on):
        self.frames, self.softs, self.refine, self.register_on = frames, softs, refine, register_on

    def __call__(self, index):
        return refine_sequence_mask(self.frames, self.softs, index, self.refine, self.register_on)


class _DefenceJob:
    def __init__(self, frames, softs, refine, flow, fusion, register_on):
        self.frames, self.softs = frames, softs
        self.refine, self.flow, self.fusion, self.register_on = refine, flow, fusion, register_on
        self.cache = {}

    def __call__(self, index):
        start = time.perf_counter()
        result = defence_frame_detailed(self.frames, self.softs, index, self.refine, self.flow,
                                        self.fusion, self.register_on, self.cache)
        stages = ", ".join(f"{k} {v:.2f}s" for k, v in result.timings.items())
        log.info("frame %d done in %.2fs (%s)", index, time.perf_counter() - start, stages)
        return result.frame, result.refined_mask


def cmd_refine_masks(args):
    refine, _, _ = _params(args)
    frames, softs = _load_inputs(args)
    masks = _map(_RefineJob(frames, softs, refine, args.register_on), range(len(frames)), args.jobs)
    io.save_mask_sequence(masks, args.out)
    log.info("wrote %d refined masks to %s", len(masks), args.out)


def cmd_defence(args):
    refine, flow, fusion = _params(args)
    frames, softs = _load_inputs(args)
    if args.target is not None and not 0 <= args.target < len(frames):
        raise DefenceError(f"--target {args.target} outside 0..{len(frames) - 1}")
    targets = range(len(frames)) if args.target is None else [args.target]
    results = _map(_DefenceJob(frames, softs, refine, flow, fusion, args.register_on), targets, args.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    for index, (frame, mask) in zip(targets, results):
        io.save_frame(frame, args.out / io.sequence_name(index))
        if args.save_masks:
            io.save_mask(mask, args.out / io.sequence_name(index, io.MASK_PREFIX))


def cmd_synth(args):
    spec = io.load_scene_spec(args.spec)
    spec.validate()
    fenced, clean, masks = generate_scene(spec)
    io.save_sequence(fenced, args.out / "fenced")
    io.save_sequence(clean, args.out / "clean")
    io.save_mask_sequence(masks, args.out / "masks")
    log.info("wrote %d synthetic frames to %s", len(fenced), args.out)


def cmd_eval(args):
    truth_paths = io.sequence_paths(args.truth)
    mask_paths = io.sequence_paths(args.masks, io.MASK_PREFIX)
    if len(mask_paths) != len(truth_paths):
        raise DefenceError(f"{len(truth_paths)} truth frames but {len(mask_paths)} masks")
    truth_masks = [io.load_mask(p) for p in mask_paths]
    records = []
    for index, (truth_path, mask) in enumerate(zip(truth_paths, truth_masks)):
        result_path = args.result / io.sequence_name(index)
        if not result_path.exists():
            continue
        result = io.load_frame(result_path)
        truth = io.load_frame(truth_path)
        records.append((f"psnr_frame_{index:05d}", psnr(result, truth)))
        if mask.bits.any():
            records.append((f"psnr_fence_{index:05d}", psnr(result, truth, mask)))
    if not records:
        raise DefenceError(f"no result frames in {args.result} match the truth sequence")
    if args.predicted_masks is not None:
        predicted = io.load_mask_sequence(args.predicted_masks)
        if len(predicted) != len(truth_masks):
            raise DefenceError(f"{len(predicted)} predicted masks but {len(truth_masks)} truth masks")
        # pool all frames into one tall mask so counts aggregate over the sequence
        pooled = mask_prf(FenceMask(np.vstack([m.bits for m in predicted])),
                          FenceMask(np.vstack([m.bits for m in truth_masks])))
        records += list(zip(("precision", "recall", "f_measure"), pooled))
    print(format_records(records))


COMMANDS = {
    "refine-masks": cmd_refine_masks,
    "defence": cmd_defence,
    "synth": cmd_synth,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        COMMANDS[args.command](args)
    except (DefenceError, ValueError, IndexError, OSError) as exc:
        print(f"videodefence {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
