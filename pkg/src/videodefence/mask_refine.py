"""Temporal refinement of per-frame fence masks and morphological closing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .core import FenceMask, SoftMask, Translation, check_same_shape
from .registration import warp_by_translation


@dataclass(frozen=True)
class RefineParams:
    """Knobs for temporal refinement.

    ``m`` neighbouring predictions are averaged and thresholded at ``mu``;
    the result is closed with a disk of ``close_radius``.
    """

    m: int = 5
    mu: float = 0.5
    close_radius: int = 1
    close_iterations: int = 1

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be >= 0")
        if not 0 < self.mu <= 1:
            raise ValueError("mu must lie in (0, 1]")
        if self.close_radius < 0 or self.close_iterations < 0:
            raise ValueError("close_radius and close_iterations must be >= 0")


def disk(radius: int) -> np.ndarray:
    r = int(radius)
    yy, xx = np.mgrid[-r:r + 1, -r:r + 1]
    return xx * xx + yy * yy <= r * r


def morph_close(mask: FenceMask, radius: int, iterations: int = 1) -> FenceMask:
    """Binary closing with a disk structuring element.

    The mask is zero-padded before dilating so that pixels on the image
    border are never eroded away; the result always contains the input.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if radius == 0 or iterations == 0:
        return mask
    pad = radius * iterations
    padded = np.pad(mask.bits, pad)
    se = disk(radius)
    grown = ndimage.binary_dilation(padded, structure=se, iterations=iterations)
    closed = ndimage.binary_erosion(grown, structure=se, iterations=iterations, border_value=0)
    return FenceMask(closed[pad:-pad, pad:-pad])


def refine_mask(
    target_soft: SoftMask,
    target_binary: FenceMask,
    neighbor_softs: Sequence[SoftMask],
    transforms: Sequence[Translation],
    params: RefineParams = RefineParams(),
) -> FenceMask:
    """Refine the target mask with warped neighbour predictions.

    Each neighbour's soft prediction is shifted into the target frame, the
    shifted scores are averaged and thresholded at ``params.mu``, and the
    result is ORed into ``target_binary`` before closing.  With no
    neighbours the closed target mask is returned.
    """
    if len(neighbor_softs) != len(transforms):
        raise ValueError("need exactly one transform per neighbour mask")
    if len(neighbor_softs) > params.m:
        raise ValueError(f"got {len(neighbor_softs)} neighbours but m = {params.m}")
    check_same_shape(target_soft, target_binary, *neighbor_softs)

    refined = target_binary.bits
    if neighbor_softs:
        total = np.zeros(target_binary.shape)
        for soft, t in zip(neighbor_softs, transforms):
            total += warp_by_translation(soft, t).scores
        mean = total / len(neighbor_softs)
        refined = refined | (mean >= params.mu)
    return morph_close(FenceMask(refined), params.close_radius, params.close_iterations)
