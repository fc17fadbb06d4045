"""Fast-marching inpainting (Telea 2004) for pixels no neighbour can see."""
from __future__ import annotations

import heapq

import numpy as np
from numba import njit

from ..core import Frame, check_same_shape
from ..errors import AllHoles

KNOWN = 0
BAND = 1
INSIDE = 2
FAR = 1.0e6


@njit(cache=True)
def _solve_eikonal(flag, dist, i1, j1, i2, j2):
    h, w = flag.shape
    if i1 < 0 or i1 >= h or j1 < 0 or j1 >= w or i2 < 0 or i2 >= h or j2 < 0 or j2 >= w:
        # fall back to whichever neighbour exists
        if 0 <= i1 < h and 0 <= j1 < w and flag[i1, j1] == KNOWN:
            return 1.0 + dist[i1, j1]
        if 0 <= i2 < h and 0 <= j2 < w and flag[i2, j2] == KNOWN:
            return 1.0 + dist[i2, j2]
        return FAR
    t1 = dist[i1, j1]
    t2 = dist[i2, j2]
    if flag[i1, j1] == KNOWN:
        if flag[i2, j2] == KNOWN:
            d = 2.0 - (t1 - t2) * (t1 - t2)
            if d > 0.0:
                r = np.sqrt(d)
                s = 0.5 * (t1 + t2 - r)
                if s >= t1 and s >= t2:
                    return s
                s += r
                if s >= t1 and s >= t2:
                    return s
            return 1.0 + min(t1, t2)
        return 1.0 + t1
    if flag[i2, j2] == KNOWN:
        return 1.0 + t2
    return FAR


@njit(cache=True)
def _axis_diff(field, flag, i, j, di, dj, worst):
    # central difference over pixels flagged <= worst, one-sided at borders/holes
    h, w = flag.shape
    ip, jp = i + di, j + dj
    im, jm = i - di, j - dj
    fwd = 0 <= ip < h and 0 <= jp < w and flag[ip, jp] <= worst
    bwd = 0 <= im < h and 0 <= jm < w and flag[im, jm] <= worst
    if fwd and bwd:
        return 0.5 * (field[ip, jp] - field[im, jm])
    if fwd:
        return field[ip, jp] - field[i, j]
    if bwd:
        return field[i, j] - field[im, jm]
    return 0.0


@njit(cache=True)
def _inpaint_pixel(img, flag, dist, i, j, radius):
    h, w = flag.shape
    gti = _axis_diff(dist, flag, i, j, 1, 0, BAND)
    gtj = _axis_diff(dist, flag, i, j, 0, 1, BAND)
    acc = np.zeros(img.shape[2])
    wsum = 0.0
    r2max = radius * radius
    for k in range(max(0, i - radius), min(h, i + radius + 1)):
        for l in range(max(0, j - radius), min(w, j + radius + 1)):
            if flag[k, l] == INSIDE:
                continue
            ri = i - k
            rj = j - l
            r2 = ri * ri + rj * rj
            if r2 == 0 or r2 > r2max:
                continue
            rn = np.sqrt(r2)
            direction = (ri * gti + rj * gtj) / rn
            if abs(direction) <= 0.01:
                direction = 1e-6
            dst = 1.0 / r2
            lev = 1.0 / (1.0 + abs(dist[k, l] - dist[i, j]))
            wt = abs(direction * dst * lev)
            for c in range(img.shape[2]):
                # colour gradients only trust pixels already filled
                gi = _axis_diff(img[:, :, c], flag, k, l, 1, 0, KNOWN)
                gj = _axis_diff(img[:, :, c], flag, k, l, 0, 1, KNOWN)
                acc[c] += wt * (img[k, l, c] + gi * ri + gj * rj)
            wsum += wt
    if wsum > 0.0:
        for c in range(img.shape[2]):
            v = acc[c] / wsum
            img[i, j, c] = min(1.0, max(0.0, v))


@njit(cache=True)
def _fast_march(img, holes, radius):
    h, w = holes.shape
    flag = np.zeros((h, w), dtype=np.int8)
    dist = np.zeros((h, w))
    heap = [(0.0, 0, 0)]
    heap.pop()
    for i in range(h):
        for j in range(w):
            if holes[i, j]:
                flag[i, j] = INSIDE
                dist[i, j] = FAR
    for i in range(h):
        for j in range(w):
            if flag[i, j] != KNOWN:
                continue
            for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                k, l = i + di, j + dj
                if 0 <= k < h and 0 <= l < w and flag[k, l] == INSIDE:
                    flag[i, j] = BAND
                    heapq.heappush(heap, (0.0, i, j))
                    break
    while len(heap) > 0:
        _, i, j = heapq.heappop(heap)
        if flag[i, j] == KNOWN:
            continue
        flag[i, j] = KNOWN
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            k, l = i + di, j + dj
            if k < 0 or k >= h or l < 0 or l >= w or flag[k, l] == KNOWN:
                continue
            t = min(
                min(_solve_eikonal(flag, dist, k - 1, l, k, l - 1),
                    _solve_eikonal(flag, dist, k + 1, l, k, l - 1)),
                min(_solve_eikonal(flag, dist, k - 1, l, k, l + 1),
                    _solve_eikonal(flag, dist, k + 1, l, k, l + 1)),
            )
            if flag[k, l] == INSIDE:
                dist[k, l] = t
                flag[k, l] = BAND
                _inpaint_pixel(img, flag, dist, k, l, radius)
            elif t < dist[k, l]:
                dist[k, l] = t
            heapq.heappush(heap, (dist[k, l], k, l))


def inpaint_fast_marching(frame: Frame, holes, radius: int = 5) -> Frame:
    """Fill ``holes`` by marching inward from their boundary.

    Each hole pixel becomes a weighted average of first-order estimates from
    already-known pixels within ``radius``; the weights favour pixels close
    by, along the marching direction, and on the same distance level.
    """
    holes = np.asarray(holes, dtype=bool)
    check_same_shape(frame, holes)
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if not holes.any():
        return frame
    if holes.all():
        raise AllHoles("nothing to inpaint from: every pixel is a hole")
    img = np.array(frame.data, dtype=np.float64)
    _fast_march(img, holes, int(radius))
    return Frame(img)
