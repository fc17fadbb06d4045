"""Cleaning up a noisy fence detector with its neighbours.

A per-frame detector misses pieces of wire.  Averaging registered
predictions from nearby frames fills the gaps; the closing removes
pinholes.
"""
import numpy as np

from videodefence import FenceSpec, RefineParams, SceneSpec, SoftMask, generate_scene
from videodefence.metrics import mask_prf
from videodefence.tv_fusion import refine_sequence_mask

scene = SceneSpec(width=96, height=72, frame_count=6, fence_motion=(1.0, 0.0),
                  fence=FenceSpec(wire_width=2, cell_size=14))
fenced, _, truth = generate_scene(scene)

# simulate a detector: confident on most wire pixels, dropping 30% of them
rng = np.random.default_rng(3)
softs = []
for m in truth:
    scores = m.bits * rng.uniform(0.6, 1.0, m.shape)
    scores[rng.random(m.shape) < 0.3] = 0.0
    softs.append(SoftMask(scores))

raw = softs[0].binarize(0.5)
p, r, f = mask_prf(raw, truth[0])
print(f"raw detector      P={p:.3f} R={r:.3f} F={f:.3f}")

for mu in (0.3, 0.5, 0.7):
    refined = refine_sequence_mask(fenced, softs, 0, RefineParams(m=5, mu=mu))
    p, r, f = mask_prf(refined, truth[0])
    print(f"refined, mu={mu:.1f}  P={p:.3f} R={r:.3f} F={f:.3f}")
