"""Per-frame de-fencing: refine masks, estimate background flow, fuse,
recover, composite and inpaint what remains."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core import FenceMask, FlowField, Frame, SoftMask, Translation, check_same_shape, to_grayscale
from ..errors import DegenerateInput, NeighborWindowEmpty
from ..mask_refine import RefineParams, refine_mask
from ..optical_flow import FlowParams, estimate_flow, warp_frame, warp_mask
from ..registration import phase_correlate
from .fuse import (FusionParams, SourceIndexMap, fuse_weighted_mean, nearest_source_index,
                   neighbor_window, recover_and_composite, temporal_weights)
from .inpaint import inpaint_fast_marching

log = logging.getLogger(__name__)

BINARIZE_THRESHOLD = 0.5


@dataclass
class DefenceResult:
    frame: Frame
    refined_mask: FenceMask
    neighbors: list[int]
    weights: np.ndarray
    flows: list[FlowField]
    x_hat: Frame
    uncovered: np.ndarray
    index_map: SourceIndexMap
    holes: np.ndarray
    timings: dict = field(default_factory=dict)


def register(reference, moving) -> Translation:
    """Phase correlation that degrades to a zero shift on featureless input."""
    try:
        return phase_correlate(reference, moving)
    except DegenerateInput:
        return Translation(0.0, 0.0)


def refine_sequence_mask(frames: Sequence[Frame], soft_masks: Sequence[SoftMask], index: int,
                         params: RefineParams = RefineParams(), register_on: str = "masks") -> FenceMask:
    """Refine the mask of frame ``index`` using its ``params.m`` nearest frames.

    Translations are measured between the soft masks (the fence layer) or,
    with ``register_on="frames"``, between luminance images.
    """
    if register_on not in ("masks", "frames"):
        raise ValueError("register_on must be 'masks' or 'frames'")
    window = neighbor_window(index, len(frames), params.m)

    def layer(k):
        return soft_masks[k].scores if register_on == "masks" else to_grayscale(frames[k])

    transforms = [register(layer(k), layer(index)) for k in window]
    return refine_mask(soft_masks[index], soft_masks[index].binarize(BINARIZE_THRESHOLD),
                       [soft_masks[k] for k in window], transforms, params)


def defence_frame_detailed(frames: Sequence[Frame], soft_masks: Sequence[SoftMask], target_index: int,
                           refine: RefineParams = RefineParams(), flow: FlowParams = FlowParams(),
                           fusion: FusionParams = FusionParams(), register_on: str = "masks",
                           refined_masks: dict | None = None) -> DefenceResult:
    """Run the full recovery for one target frame and keep the intermediates.

    ``refined_masks`` may carry refined masks keyed by frame index; missing
    entries are computed and stored, so a caller looping over a video can
    share them between targets.
    """
    if len(frames) != len(soft_masks):
        raise ValueError("need one soft mask per frame")
    if not 0 <= target_index < len(frames):
        raise IndexError(f"target index {target_index} outside 0..{len(frames) - 1}")
    check_same_shape(*frames, *soft_masks)
    window = neighbor_window(target_index, len(frames), fusion.n)
    if not window:
        raise NeighborWindowEmpty(f"no neighbour frames for target {target_index}")

    timings = {}
    cache = {} if refined_masks is None else refined_masks
    t0 = time.perf_counter()
    for k in [target_index, *window]:
        if k not in cache:
            cache[k] = refine_sequence_mask(frames, soft_masks, k, refine, register_on)
    timings["refine"] = time.perf_counter() - t0

    target = frames[target_index]
    p_target = cache[target_index]
    distances = [k - target_index for k in window]
    weights = temporal_weights(distances)

    t0 = time.perf_counter()
    flows, warped, visible = [], [], []
    for k in window:
        f = estimate_flow(target, frames[k], p_target, flow, neighbor_fence=cache[k])
        wk, valid = warp_frame(frames[k], f)
        flows.append(f)
        warped.append(wk)
        visible.append(valid & ~warp_mask(cache[k], f, fusion.visibility_tolerance))
    timings["flow"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    x_hat, uncovered = fuse_weighted_mean(warped, visible, weights, fusion)
    index_map = nearest_source_index(x_hat, warped, visible, distances)
    result, holes = recover_and_composite(target, p_target, index_map, warped)
    timings["fuse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    if holes.any():
        result = inpaint_fast_marching(result, holes, fusion.inpaint_radius)
    timings["inpaint"] = time.perf_counter() - t0
    log.debug("frame %d: %s", target_index,
              ", ".join(f"{k} {v:.2f}s" for k, v in timings.items()))

    return DefenceResult(result, p_target, window, weights, flows, x_hat, uncovered,
                         index_map, holes, timings)


def defence_frame(frames: Sequence[Frame], soft_masks: Sequence[SoftMask], target_index: int,
                  refine: RefineParams = RefineParams(), flow: FlowParams = FlowParams(),
                  fusion: FusionParams = FusionParams()) -> Frame:
    """De-fenced version of ``frames[target_index]``."""
    return defence_frame_detailed(frames, soft_masks, target_index, refine, flow, fusion).frame
