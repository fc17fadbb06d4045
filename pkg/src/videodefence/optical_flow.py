"""Occlusion-aware coarse-to-fine optical flow.

The flow ``F = (u, v)`` maps target pixels into the neighbour frame and
minimises a robust (L1) brightness-constancy term restricted to non-fence
pixels plus an anisotropic L1 smoothness term on ``u`` and ``v``.  At each
pyramid level the neighbour is warped by the current flow, the data term
is linearised, and the increment ``(du, dv)`` is found by iteratively
re-weighted least squares whose weighted systems are relaxed with
successive over-relaxation sweeps in raster order.

Fence pixels receive zero data weight, so the flow underneath the fence
is determined by the smoothness term alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import ndimage

from .core import FenceMask, FlowField, Frame, bilinear_sample, check_same_shape, to_grayscale
from .errors import InputTooSmall, NonFiniteState

BLUR_REACH = 2.0


@dataclass(frozen=True)
class FlowParams:
    lam: float = 0.0005
    pyramid_scale: float = 0.5
    min_dimension: int = 16
    outer_warps_per_level: int = 3
    irls_iterations: int = 5
    sor_iterations: int = 30
    sor_omega: float = 1.9
    irls_epsilon: float = 1e-3
    median_filter: bool = True
    init_search_radius: int = 8

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be > 0")
        if not 0 < self.pyramid_scale < 1:
            raise ValueError("pyramid_scale must lie in (0, 1)")
        if not 0 < self.sor_omega < 2:
            raise ValueError("sor_omega must lie in (0, 2)")
        if self.irls_epsilon <= 0:
            raise ValueError("irls_epsilon must be > 0")
        if self.min_dimension < 1:
            raise ValueError("min_dimension must be >= 1")
        if self.init_search_radius < 0:
            raise ValueError("init_search_radius must be >= 0")


@dataclass
class Pyramid:
    """Image pyramid, ``levels[0]`` is the finest (the input)."""

    levels: list = field(default_factory=list)

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [lvl.shape for lvl in self.levels]

    def __len__(self):
        return len(self.levels)


def pyramid_shapes(shape, params: FlowParams) -> list[tuple[int, int]]:
    h, w = shape
    if min(h, w) < params.min_dimension:
        raise InputTooSmall(
            f"{w}x{h} image is smaller than min_dimension={params.min_dimension}"
        )
    shapes = [(h, w)]
    while True:
        nh = int(round(shapes[-1][0] * params.pyramid_scale))
        nw = int(round(shapes[-1][1] * params.pyramid_scale))
        if min(nh, nw) < params.min_dimension:
            return shapes
        shapes.append((nh, nw))


def _resample_coords(src_shape, dst_shape):
    # pixel-centre aligned mapping of dst pixels into src coordinates
    (sh, sw), (dh, dw) = src_shape, dst_shape
    ys = (np.arange(dh) + 0.5) * (sh / dh) - 0.5
    xs = (np.arange(dw) + 0.5) * (sw / dw) - 0.5
    ys = np.clip(ys, 0, sh - 1)
    xs = np.clip(xs, 0, sw - 1)
    return np.meshgrid(xs, ys)


def resample(image: np.ndarray, shape) -> np.ndarray:
    xs, ys = _resample_coords(image.shape[:2], shape)
    return bilinear_sample(image, xs, ys)[0]


def build_pyramid(image, params: FlowParams = FlowParams()) -> Pyramid:
    """Gaussian pyramid with ``sigma = 1/sqrt(2*scale)`` pre-smoothing."""
    image = np.asarray(image, dtype=np.float64)
    shapes = pyramid_shapes(image.shape, params)
    sigma = 1.0 / np.sqrt(2.0 * params.pyramid_scale)
    levels = [image]
    for shape in shapes[1:]:
        smoothed = ndimage.gaussian_filter(levels[-1], sigma, mode="nearest")
        levels.append(resample(smoothed, shape))
    return Pyramid(levels)


def downsample_mask(mask: np.ndarray, shape) -> np.ndarray:
    """A coarse pixel is fence if any fine pixel in its footprint is fence."""
    fh, fw = mask.shape
    ch, cw = shape
    ri = np.minimum(((np.arange(fh) + 0.5) * ch / fh).astype(np.intp), ch - 1)
    ci = np.minimum(((np.arange(fw) + 0.5) * cw / fw).astype(np.intp), cw - 1)
    out = np.zeros(shape, dtype=np.uint8)
    np.maximum.at(out, (ri[:, None], ci[None, :]), mask.astype(np.uint8))
    return out.astype(bool)


def mask_pyramid(mask: np.ndarray, shapes, params: FlowParams) -> list[np.ndarray]:
    """Fence masks matching :func:`build_pyramid` levels.

    Before each reduction the mask is dilated by the pre-smoothing reach
    (``ceil(BLUR_REACH * sigma)``) so blurred fence colour stays masked.
    """
    sigma = 1.0 / np.sqrt(2.0 * params.pyramid_scale)
    se = ndimage.generate_binary_structure(2, 1)
    reach = int(np.ceil(BLUR_REACH * sigma))
    levels = [np.asarray(mask, dtype=bool)]
    for shape in shapes[1:]:
        grown = ndimage.binary_dilation(levels[-1], se, iterations=reach) if levels[-1].any() else levels[-1]
        levels.append(downsample_mask(grown, shape))
    return levels


def upsample_flow(u, v, shape):
    h, w = u.shape
    fh, fw = shape
    return resample(u, shape) * (fw / w), resample(v, shape) * (fh / h)


@njit(cache=True)
def sor_sweeps(ix, iy, it, psi, wux, wuy, wvx, wvy, u, v, du, dv, omega, iterations):
    """Relax the IRLS normal equations for ``(du, dv)`` in place.

    ``psi`` are the data weights, ``wux``/``wuy`` the weights of the
    horizontal/vertical forward differences of ``u`` (shapes ``(H, W-1)``
    and ``(H-1, W)``), likewise ``wvx``/``wvy`` for ``v``.  Pixels are
    visited in raster order, updating ``du`` then ``dv``.
    """
    h, w = u.shape
    for _ in range(iterations):
        for i in range(h):
            for j in range(w):
                a_u = psi[i, j] * ix[i, j] * ix[i, j]
                a_v = psi[i, j] * iy[i, j] * iy[i, j]
                b_u = -psi[i, j] * ix[i, j] * (it[i, j] + iy[i, j] * dv[i, j])
                su = 0.0
                sv = 0.0
                if j + 1 < w:
                    e = wux[i, j]
                    a_u += e
                    su += e * (u[i, j + 1] + du[i, j + 1] - u[i, j])
                    e = wvx[i, j]
                    a_v += e
                    sv += e * (v[i, j + 1] + dv[i, j + 1] - v[i, j])
                if j > 0:
                    e = wux[i, j - 1]
                    a_u += e
                    su += e * (u[i, j - 1] + du[i, j - 1] - u[i, j])
                    e = wvx[i, j - 1]
                    a_v += e
                    sv += e * (v[i, j - 1] + dv[i, j - 1] - v[i, j])
                if i + 1 < h:
                    e = wuy[i, j]
                    a_u += e
                    su += e * (u[i + 1, j] + du[i + 1, j] - u[i, j])
                    e = wvy[i, j]
                    a_v += e
                    sv += e * (v[i + 1, j] + dv[i + 1, j] - v[i, j])
                if i > 0:
                    e = wuy[i - 1, j]
                    a_u += e
                    su += e * (u[i - 1, j] + du[i - 1, j] - u[i, j])
                    e = wvy[i - 1, j]
                    a_v += e
                    sv += e * (v[i - 1, j] + dv[i - 1, j] - v[i, j])
                if a_u > 0.0:
                    du[i, j] = (1.0 - omega) * du[i, j] + omega * (b_u + su) / a_u
                b_v = -psi[i, j] * iy[i, j] * (it[i, j] + ix[i, j] * du[i, j])
                if a_v > 0.0:
                    dv[i, j] = (1.0 - omega) * dv[i, j] + omega * (b_v + sv) / a_v


def smoothness_weights(u, v, lam, eps):
    """Charbonnier IRLS weights of the four forward-difference residuals."""
    def weight(d):
        return lam / np.sqrt(d * d + eps * eps)

    return (weight(np.diff(u, axis=1)), weight(np.diff(u, axis=0)),
            weight(np.diff(v, axis=1)), weight(np.diff(v, axis=0)))


def _warp_gray(image, u, v):
    h, w = image.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    return bilinear_sample(image, xs + u, ys + v)


def data_support(target_fence, neighbor_fence, u, v, valid):
    """Pixels whose data term is active: in bounds and clear of any fence."""
    ok = valid & ~target_fence
    if neighbor_fence is not None:
        hit, _ = _warp_gray(neighbor_fence.astype(np.float64), u, v)
        ok &= hit <= 0.0
    return ok


def _solve_level(i1, i2, u, v, target_fence, neighbor_fence, params: FlowParams, on_warp=None):
    lam, eps = params.lam, params.irls_epsilon
    gy, gx = np.gradient(i2)
    for _ in range(params.outer_warps_per_level):
        i2w, valid = _warp_gray(i2, u, v)
        ix, _ = _warp_gray(gx, u, v)
        iy, _ = _warp_gray(gy, u, v)
        it = i2w - i1
        support = data_support(target_fence, neighbor_fence, u, v, valid)
        du = np.zeros_like(u)
        dv = np.zeros_like(v)
        for _ in range(params.irls_iterations):
            r = it + ix * du + iy * dv
            psi = np.where(support, 1.0 / np.sqrt(r * r + eps * eps), 0.0)
            wux, wuy, wvx, wvy = smoothness_weights(u + du, v + dv, lam, eps)
            sor_sweeps(ix, iy, it, psi, wux, wuy, wvx, wvy, u, v, du, dv,
                       params.sor_omega, params.sor_iterations)
        u = u + du
        v = v + dv
        if params.median_filter:
            u = ndimage.median_filter(u, size=3, mode="nearest")
            v = ndimage.median_filter(v, size=3, mode="nearest")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise NonFiniteState("flow iterate became non-finite; check solver parameters")
        if on_warp is not None:
            on_warp(u, v)
    return u, v


def translation_search(i1, i2, target_fence, neighbor_fence, radius: int,
                       min_support: float = 0.1) -> tuple[int, int]:
    """Integer shift ``(dx, dy)`` minimising the mean fence-free L1 residual.

    Compares ``i1(x)`` with ``i2(x + dx, y + dy)`` over pixels that are in
    bounds and clear of fence in both images; shifts supported by fewer
    than ``min_support`` of the pixels are skipped.  Ties prefer the
    smaller shift.
    """
    h, w = i1.shape
    clear1 = ~target_fence
    clear2 = np.ones_like(clear1) if neighbor_fence is None else ~neighbor_fence
    best, best_key = (0, 0), None
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            ys1 = slice(max(0, -dy), min(h, h - dy))
            xs1 = slice(max(0, -dx), min(w, w - dx))
            ys2 = slice(max(0, dy), min(h, h + dy))
            xs2 = slice(max(0, dx), min(w, w + dx))
            ok = clear1[ys1, xs1] & clear2[ys2, xs2]
            count = ok.sum()
            if count < min_support * h * w:
                continue
            cost = np.abs(i2[ys2, xs2] - i1[ys1, xs1])[ok].mean()
            key = (cost, dx * dx + dy * dy)
            if best_key is None or key < best_key:
                best, best_key = (dx, dy), key
    return best


def estimate_flow(target: Frame, neighbor: Frame, combined_fence: FenceMask,
                  params: FlowParams = FlowParams(),
                  neighbor_fence: FenceMask | None = None,
                  initial: FlowField | None = None, callback=None) -> FlowField:
    """Estimate the background flow from ``target`` into ``neighbor``.

    Parameters
    ----------
    combined_fence : FenceMask
        Pixels of the target excluded from the data term.
    neighbor_fence : FenceMask, optional
        Fence mask of the neighbour.  When given it is warped by the current
        flow at every outer iteration and its support removed from the data
        term as well, so the exclusion tracks the evolving motion.
    initial : FlowField, optional
        Starting flow at full resolution.  By default the best integer
        translation within ``params.init_search_radius`` is used (zero when
        the radius is 0).
    callback : callable, optional
        Called as ``callback(level, FlowField)`` after every outer warp.
    """
    check_same_shape(target, neighbor, combined_fence)
    if neighbor_fence is not None:
        check_same_shape(target, neighbor_fence)
    p1 = build_pyramid(to_grayscale(target), params)
    p2 = build_pyramid(to_grayscale(neighbor), params)
    shapes = p1.shapes

    fences1 = mask_pyramid(combined_fence.bits, shapes, params)
    fences2 = (mask_pyramid(neighbor_fence.bits, shapes, params) if neighbor_fence is not None
               else [None] * len(shapes))

    coarse = shapes[-1]
    if initial is None and params.init_search_radius > 0:
        dx, dy = translation_search(p1.levels[0], p2.levels[0], fences1[0], fences2[0],
                                    params.init_search_radius)
        initial = FlowField.uniform(*shapes[0], dx, dy)
    if initial is None:
        u = np.zeros(coarse)
        v = np.zeros(coarse)
    else:
        check_same_shape(target, initial)
        h, w = shapes[0]
        u = resample(initial.u.astype(np.float64), coarse) * (coarse[1] / w)
        v = resample(initial.v.astype(np.float64), coarse) * (coarse[0] / h)

    for level in range(len(shapes) - 1, -1, -1):
        if u.shape != shapes[level]:
            u, v = upsample_flow(u, v, shapes[level])
        hook = None
        if callback is not None:
            def hook(uu, vv, level=level):
                callback(level, FlowField(uu, vv))
        u, v = _solve_level(p1.levels[level], p2.levels[level], u, v,
                            fences1[level], fences2[level], params, hook)
    return FlowField(u, v)


def warp_frame(neighbor: Frame, flow: FlowField):
    """Backward-warp ``neighbor`` into target coordinates.

    Returns ``(warped, validity)``; validity is False where the sample
    position left the frame (those pixels are black).
    """
    check_same_shape(neighbor, flow)
    h, w = flow.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    values, valid = bilinear_sample(neighbor.data, xs + flow.u, ys + flow.v)
    return Frame(values), valid


def warp_mask(mask: FenceMask, flow: FlowField, tolerance: float = 0.0) -> np.ndarray:
    """Fence support pulled back through ``flow``.

    A pixel is fence if the bilinear weight its sample position puts on
    fence pixels exceeds ``tolerance`` (by default: any tap touching the
    fence); positions outside the frame count as fence.
    """
    check_same_shape(mask, flow)
    hit, valid = _warp_gray(mask.bits.astype(np.float64), flow.u.astype(np.float64),
                            flow.v.astype(np.float64))
    return (hit > tolerance) | ~valid


def flow_energy(target: Frame, neighbor: Frame, flow: FlowField, combined_fence: FenceMask,
                lam: float, neighbor_fence: FenceMask | None = None) -> float:
    """Discrete robust energy of ``flow`` at full resolution.

    Sum over supported pixels of ``|Y_k(x + F) - Y_o(x)|`` plus ``lam``
    times the anisotropic L1 norm of the forward differences of ``u``, ``v``.
    """
    i1 = to_grayscale(target)
    i2 = to_grayscale(neighbor)
    u = flow.u.astype(np.float64)
    v = flow.v.astype(np.float64)
    i2w, valid = _warp_gray(i2, u, v)
    nf = None if neighbor_fence is None else neighbor_fence.bits
    support = data_support(combined_fence.bits, nf, u, v, valid)
    data = np.abs(i2w - i1)[support].sum()
    smooth = sum(np.abs(np.diff(c, axis=ax)).sum() for c in (u, v) for ax in (0, 1))
    return float(data + lam * smooth)
