from .fuse import (SENTINEL_NONE, FusionParams, SourceIndexMap, fuse_weighted_mean,
                   nearest_source_index, neighbor_window, recover_and_composite, temporal_weights)
from .inpaint import inpaint_fast_marching
from .pipeline import DefenceResult, defence_frame, defence_frame_detailed, refine_sequence_mask
from .prox import prox_tv_1d, prox_tv_2d, tv_objective

__all__ = [
    "SENTINEL_NONE", "FusionParams", "SourceIndexMap", "DefenceResult",
    "fuse_weighted_mean", "nearest_source_index", "neighbor_window", "recover_and_composite",
    "temporal_weights", "inpaint_fast_marching", "defence_frame", "defence_frame_detailed",
    "refine_sequence_mask", "prox_tv_1d", "prox_tv_2d", "tv_objective",
]
