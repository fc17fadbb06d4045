"""FFT phase correlation for translation between frames or masks."""
from __future__ import annotations

import numpy as np

from .core import SoftMask, Translation, bilinear_sample
from .errors import DegenerateInput, DimensionMismatch

SPECTRUM_EPS = 1e-12
MIN_SIZE = 8
# parabola offsets below this are round-off from symmetric peaks
SUBPIXEL_FLOOR = 1e-9


def _parabolic_offset(minus, centre, plus):
    denom = minus - 2.0 * centre + plus
    if denom >= 0 or not np.isfinite(denom):
        return 0.0
    offset = 0.5 * (minus - plus) / denom
    if abs(offset) < SUBPIXEL_FLOOR:
        return 0.0
    return float(np.clip(offset, -0.5, 0.5))


def phase_correlate(reference, moving, window: bool = False) -> Translation:
    """Estimate the displacement of ``moving`` relative to ``reference``.

    If ``moving`` is ``reference`` circularly shifted by ``(dx, dy)`` (content
    moved right by ``dx`` and down by ``dy``), the result is ``(dx, dy)``.
    The integer peak of the inverse-transformed normalised cross-power
    spectrum is unwrapped to ``(-W/2, W/2] x (-H/2, H/2]`` and refined with a
    three-point parabola along each axis.

    Parameters
    ----------
    reference, moving : ndarray, shape (H, W)
    window : bool
        Apply a separable Hann window before transforming.
    """
    a = np.asarray(reference, dtype=np.float64)
    b = np.asarray(moving, dtype=np.float64)
    if a.ndim != 2 or a.shape != b.shape:
        raise DimensionMismatch(f"cannot register grids of shape {a.shape} and {b.shape}")
    h, w = a.shape
    if h < MIN_SIZE or w < MIN_SIZE:
        raise DimensionMismatch(f"grids must be at least {MIN_SIZE}x{MIN_SIZE}, got {w}x{h}")
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise DegenerateInput("phase correlation of a constant image is undefined")

    a = a - a.mean()
    b = b - b.mean()
    if window:
        hann = np.outer(np.hanning(h), np.hanning(w))
        a, b = a * hann, b * hann

    cross = np.conj(np.fft.fft2(a)) * np.fft.fft2(b)
    cross /= np.abs(cross) + SPECTRUM_EPS
    surface = np.fft.ifft2(cross).real

    py, px = np.unravel_index(np.argmax(surface), surface.shape)
    sub_x = _parabolic_offset(surface[py, (px - 1) % w], surface[py, px], surface[py, (px + 1) % w])
    sub_y = _parabolic_offset(surface[(py - 1) % h, px], surface[py, px], surface[(py + 1) % h, px])

    dx = px - w if px > w // 2 else px
    dy = py - h if py > h // 2 else py
    return Translation(float(dx + sub_x), float(dy + sub_y))


def warp_by_translation(mask: SoftMask, t: Translation) -> SoftMask:
    """Shift a soft mask by ``t``; samples falling outside score zero."""
    h, w = mask.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    values, _ = bilinear_sample(mask.scores, xs - t.dx, ys - t.dy)
    return SoftMask(values)
