"""Video de-fencing: temporal mask refinement, occlusion-aware optical
flow, TV-regularised multi-frame fusion and synthetic evaluation."""
from .core import FenceMask, FlowField, Frame, SoftMask, Translation, sample_bilinear, to_grayscale
from .errors import DefenceError
from .mask_refine import RefineParams, morph_close, refine_mask
from .metrics import PSNR_INFINITE, mask_prf, psnr
from .optical_flow import FlowParams, build_pyramid, estimate_flow, warp_frame
from .registration import phase_correlate, warp_by_translation
from .synth import FenceSpec, SceneSpec, generate_fence_mask, generate_scene
from .tv_fusion import (SENTINEL_NONE, FusionParams, SourceIndexMap, defence_frame,
                        defence_frame_detailed, fuse_weighted_mean, inpaint_fast_marching,
                        nearest_source_index, prox_tv_1d, prox_tv_2d, recover_and_composite)

__version__ = "0.1.0"
