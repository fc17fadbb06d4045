"""Background motion underneath a fence.

The flow's data term ignores fence pixels, so the motion there comes from
the smoothness term: the background flow is carried across the wires.
"""
import numpy as np
from scipy import ndimage

from videodefence import FenceMask, FlowParams, Frame, estimate_flow, warp_frame

rng = np.random.default_rng(1)
texture = ndimage.gaussian_filter(rng.random((140, 150, 3)), (2.5, 2.5, 0))
texture = (texture - texture.min()) / np.ptp(texture)
target = Frame(texture[:128, 5:133])
neighbor = Frame(texture[:128, 0:128])  # the background moved 5 px right

yy, xx = np.mgrid[0:128, 0:128]
fence = ((xx + yy) % 12 < 2) | ((xx - yy) % 12 < 2)
print(f"fence covers {fence.mean():.1%} of the frame")

for start, params in (("zero", FlowParams(init_search_radius=0)), ("integer search", FlowParams())):
    flow = estimate_flow(target, neighbor, FenceMask(fence), params)
    err = np.hypot(flow.u - 5, flow.v)
    print(f"start={start:15s} mean error on fence {err[fence].mean():.3f} px, "
          f"elsewhere {err[~fence].mean():.3f} px")

warped, valid = warp_frame(neighbor, flow)
diff = np.abs(warped.data - target.data).max(axis=-1)
print(f"mean colour difference after warping, valid pixels: {diff[valid].mean():.5f}")
