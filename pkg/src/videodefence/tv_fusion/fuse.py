"""Multi-frame fusion: TV-regularised weighted mean, nearest-source
selection, recovery and compositing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from ..core import FenceMask, Frame, check_same_shape
from ..errors import EmptyInput
from .prox import prox_tv_2d

SENTINEL_NONE = -1


@dataclass(frozen=True)
class FusionParams:
    """Content-recovery settings.

    ``n`` neighbours are fused; ``lambda_fusion`` weighs the TV term of the
    weighted-mean estimate.  With ``renormalize`` the data image is divided
    by the visible weight mass per pixel instead of letting occluded
    samples pull the mean toward zero.  A warped neighbour pixel counts as
    visible while the interpolated fence weight at its sample position is
    at most ``visibility_tolerance``.
    """

    n: int = 6
    lambda_fusion: float = 0.0005
    prox_max_passes: int = 50
    prox_tolerance: float = 1e-5
    renormalize: bool = True
    inpaint_radius: int = 5
    visibility_tolerance: float = 0.01

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.lambda_fusion < 0:
            raise ValueError("lambda_fusion must be >= 0")
        if not 0 <= self.visibility_tolerance < 1:
            raise ValueError("visibility_tolerance must lie in [0, 1)")
        if self.inpaint_radius < 1:
            raise ValueError("inpaint_radius must be >= 1")


@dataclass(frozen=True, eq=False)
class SourceIndexMap:
    """Per-pixel index of the neighbour supplying content, or ``SENTINEL_NONE``."""

    indices: np.ndarray

    @property
    def shape(self):
        return self.indices.shape

    @property
    def missing(self) -> np.ndarray:
        return self.indices == SENTINEL_NONE


def temporal_weights(distances: Sequence[int]) -> np.ndarray:
    """Reciprocal-distance weights normalised to sum to one."""
    d = np.abs(np.asarray(distances, dtype=np.float64))
    if d.size == 0:
        raise EmptyInput("no neighbours to weight")
    if np.any(d == 0):
        raise ValueError("a neighbour cannot sit at temporal distance 0")
    w = 1.0 / d
    return w / w.sum()


def neighbor_window(target_index: int, frame_count: int, n: int) -> list[int]:
    """The ``n`` frames nearest ``target_index``, earlier frame first on ties."""
    if not 0 <= target_index < frame_count:
        raise IndexError(f"target index {target_index} outside 0..{frame_count - 1}")
    others = [k for k in range(frame_count) if k != target_index]
    others.sort(key=lambda k: (abs(k - target_index), k))
    return others[:n]


def fuse_weighted_mean(warped_neighbors: Sequence[Frame], warped_nonfence: Sequence,
                       weights: Sequence[float], params: FusionParams = FusionParams()):
    """Weighted mean of the visible warped neighbours, denoised with TV.

    Returns ``(x_hat, uncovered)``.  Pixels no neighbour sees are flagged in
    ``uncovered`` and filled with the nearest covered value before the prox
    so they do not bias their surroundings.  The quadratic term is not
    halved, so the prox runs at ``lambda_fusion / 2``.
    """
    if len(warped_neighbors) == 0:
        raise EmptyInput("fusion needs at least one neighbour")
    if not len(warped_neighbors) == len(warped_nonfence) == len(weights):
        raise ValueError("neighbours, visibility grids and weights differ in length")
    check_same_shape(*warped_neighbors, *[np.asarray(m) for m in warped_nonfence])

    h, w = warped_neighbors[0].shape
    num = np.zeros((h, w, 3))
    mass = np.zeros((h, w))
    for frame, vis, wk in zip(warped_neighbors, warped_nonfence, weights):
        vis = np.asarray(vis, dtype=bool)
        num += (wk * vis)[..., None] * frame.data
        mass += wk * vis
    uncovered = mass <= 0
    if params.renormalize:
        data = np.divide(num, mass[..., None], out=np.zeros_like(num), where=~uncovered[..., None])
    else:
        data = num
    if uncovered.any() and not uncovered.all():
        _, (ri, ci) = ndimage.distance_transform_edt(uncovered, return_indices=True)
        data = data[ri, ci]

    lam = params.lambda_fusion / 2.0
    if lam > 0:
        data = np.stack([
            prox_tv_2d(data[..., c], lam, params.prox_max_passes, params.prox_tolerance)
            for c in range(3)
        ], axis=-1)
    return Frame(np.clip(data, 0.0, 1.0)), uncovered


def nearest_source_index(x_hat: Frame, warped_neighbors: Sequence[Frame], warped_nonfence: Sequence,
                         temporal_distances: Sequence[int] | None = None) -> SourceIndexMap:
    """Pick, per pixel, the visible neighbour whose colour is closest to ``x_hat``.

    Ties go to the smaller temporal distance, then the smaller index.
    """
    check_same_shape(x_hat, *warped_neighbors, *[np.asarray(m) for m in warped_nonfence])
    if len(warped_neighbors) != len(warped_nonfence):
        raise ValueError("neighbours and visibility grids differ in length")
    n = len(warped_neighbors)
    if temporal_distances is None:
        temporal_distances = [0] * n
    order = sorted(range(n), key=lambda k: (abs(temporal_distances[k]), k))

    best = np.full(x_hat.shape, np.inf)
    index = np.full(x_hat.shape, SENTINEL_NONE, dtype=np.int32)
    for k in order:
        vis = np.asarray(warped_nonfence[k], dtype=bool)
        d = np.sum((warped_neighbors[k].data - x_hat.data) ** 2, axis=-1)
        better = vis & (d < best)
        best[better] = d[better]
        index[better] = k
    return SourceIndexMap(index)


def recover_and_composite(target: Frame, refined_mask: FenceMask, index_map: SourceIndexMap,
                          warped_neighbors: Sequence[Frame]):
    """Replace fence pixels of ``target`` by the selected neighbour's colour.

    Returns ``(result, holes)``; ``holes`` marks fence pixels with no source,
    which keep their target value until inpainted.
    """
    check_same_shape(target, refined_mask, index_map, *warped_neighbors)
    out = np.array(target.data)
    fence = refined_mask.bits
    for k, frame in enumerate(warped_neighbors):
        sel = fence & (index_map.indices == k)
        out[sel] = frame.data[sel]
    holes = fence & index_map.missing
    return Frame(out), holes
