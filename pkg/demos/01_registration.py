"""Registering fence masks with phase correlation.

Neighbouring frames of a fenced video see the fence at slightly different
positions.  Phase correlation recovers that shift from the masks alone.
"""
import numpy as np
from scipy import ndimage

from videodefence import FenceSpec, generate_fence_mask, phase_correlate, warp_by_translation

# a diamond fence and the same fence three pixels right, one down
spec = FenceSpec(pattern="diamond", wire_width=2, cell_size=14)
first = generate_fence_mask(spec, 96, 72).to_soft()
moved = generate_fence_mask(spec, 96, 72, offset=(3, 1)).to_soft()

t = phase_correlate(first.scores, moved.scores)
print(f"estimated shift: dx={t.dx:+.3f}, dy={t.dy:+.3f}")

# pulling the first mask forward by that shift lines it up with the second
aligned = warp_by_translation(first, t)
agree = np.mean((aligned.scores > 0.5) == (moved.scores > 0.5))
print(f"pixels agreeing after alignment: {agree:.2%}")

# sub-pixel: shift a smooth pattern by half a pixel in the Fourier domain
rng = np.random.default_rng(0)
texture = ndimage.gaussian_filter(rng.random((64, 64)), 2.0, mode="wrap")
half = np.fft.ifft2(ndimage.fourier_shift(np.fft.fft2(texture), (0.0, 0.5))).real
t = phase_correlate(texture, half)
print(f"half-pixel shift recovered as dx={t.dx:+.3f}, dy={t.dy:+.3f}")
