"""Synthetic fenced videos with pixel-exact ground truth.

A procedural background translates at one constant velocity and a
rasterised fence lattice at another; the difference (parallax) is what
lets neighbouring frames see behind the fence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import FenceMask, Frame, bilinear_sample
from .errors import InvalidSpec

PATTERNS = ("diamond", "rectangular")
BACKGROUNDS = ("smooth_noise", "gradient", "checker")
_JITTER_TABLE = 256


@dataclass(frozen=True)
class FenceSpec:
    pattern: str = "diamond"
    wire_width: float = 2.0
    cell_size: float = 16.0
    rotation: float = 0.0
    color: tuple[float, float, float] = (0.85, 0.85, 0.8)
    irregularity: float = 0.0

    def validate(self):
        if self.pattern not in PATTERNS:
            raise InvalidSpec(f"unknown fence pattern {self.pattern!r}; expected one of {PATTERNS}")
        if not self.wire_width >= 1:
            raise InvalidSpec("wire_width must be >= 1")
        if not self.cell_size > 2 * self.wire_width:
            raise InvalidSpec(
                f"cell_size ({self.cell_size}) must exceed twice wire_width ({self.wire_width})"
            )
        if len(self.color) != 3 or not all(0 <= c <= 1 for c in self.color):
            raise InvalidSpec("fence color must be three values in [0, 1]")
        if not (math.isfinite(self.rotation) and self.irregularity >= 0):
            raise InvalidSpec("rotation must be finite and irregularity >= 0")


@dataclass(frozen=True)
class SceneSpec:
    width: int = 128
    height: int = 96
    frame_count: int = 7
    background_kind: str = "smooth_noise"
    background_seed: int = 0
    background_motion: tuple[float, float] = (2.0, 0.0)
    fence_motion: tuple[float, float] = (0.0, 0.0)
    fence: FenceSpec = field(default_factory=FenceSpec)
    rng_seed: int = 0

    def validate(self):
        if self.width < 1 or self.height < 1:
            raise InvalidSpec("width and height must be >= 1")
        if self.frame_count < 1:
            raise InvalidSpec("frame_count must be >= 1")
        if self.background_kind not in BACKGROUNDS:
            raise InvalidSpec(
                f"unknown background kind {self.background_kind!r}; expected one of {BACKGROUNDS}"
            )
        for name in ("background_motion", "fence_motion"):
            vec = getattr(self, name)
            if len(vec) != 2 or not all(math.isfinite(c) for c in vec):
                raise InvalidSpec(f"{name} must be two finite numbers")
        self.fence.validate()


def _line_hits(coord, spec: FenceSpec, jitter):
    # distance of coord past each candidate line start, for lines j-1, j, j+1
    cell, width = spec.cell_size, spec.wire_width
    base = np.floor(coord / cell).astype(np.int64)
    hit = np.zeros(coord.shape, dtype=bool)
    for step in (-1, 0, 1):
        j = base + step
        start = j * cell + jitter[np.mod(j, _JITTER_TABLE)]
        off = coord - start
        hit |= (off >= 0) & (off < width)
    return hit


def generate_fence_mask(spec: FenceSpec, width: int, height: int, seed: int = 0,
                        offset: tuple[float, float] = (0.0, 0.0)) -> FenceMask:
    """Rasterise the fence lattice, shifted by ``offset`` pixels.

    Pixel ``(x, y)`` is tested at its centre ``(x + 0.5, y + 0.5)``, so a
    wire of width ``w`` covers ``w`` pixels per line on average.  With
    rotation 0, a rectangular pattern and integer ``w`` the wires are the
    columns and rows ``c`` with ``c mod cell_size < w``.
    """
    spec.validate()
    rng = np.random.default_rng(seed)
    amp = spec.irregularity
    jitter_a = rng.uniform(-amp, amp, _JITTER_TABLE) if amp > 0 else np.zeros(_JITTER_TABLE)
    jitter_b = rng.uniform(-amp, amp, _JITTER_TABLE) if amp > 0 else np.zeros(_JITTER_TABLE)

    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    xs += 0.5 - offset[0]
    ys += 0.5 - offset[1]
    angle = math.radians(spec.rotation + (45.0 if spec.pattern == "diamond" else 0.0))
    if angle == 0.0:
        a, b = xs, ys
    else:
        c, s = math.cos(angle), math.sin(angle)
        a = c * xs + s * ys
        b = -s * xs + c * ys
    return FenceMask(_line_hits(a, spec, jitter_a) | _line_hits(b, spec, jitter_b))


def background_texture(kind: str, height: int, width: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if kind == "smooth_noise":
        tex = ndimage.gaussian_filter(rng.random((height, width, 3)), sigma=(3, 3, 0), mode="wrap")
        lo = tex.min(axis=(0, 1))
        hi = tex.max(axis=(0, 1))
        return 0.05 + 0.9 * (tex - lo) / np.maximum(hi - lo, 1e-12)
    if kind == "gradient":
        ys, xs = np.mgrid[0:height, 0:width]
        phase = rng.uniform(0, 1, 3)
        tex = np.stack([
            0.5 + 0.4 * np.sin(2 * np.pi * (xs / width + ys / (2 * height) + p)) for p in phase
        ], axis=-1)
        return tex
    # checker
    size = 8
    ys, xs = np.mgrid[0:height, 0:width]
    board = ((xs // size + ys // size) % 2).astype(np.float64)
    board = ndimage.gaussian_filter(board, 1.0)
    colors = rng.uniform(0.1, 0.9, (2, 3))
    return colors[0] * (1 - board[..., None]) + colors[1] * board[..., None]


def generate_scene(spec: SceneSpec):
    """Render ``(fenced_frames, clean_frames, masks)`` for every frame.

    Clean frame ``t`` shows the background displaced by ``t *
    background_motion``; mask ``t`` is the fence displaced by ``t *
    fence_motion``; the fenced frame paints the fence colour over the mask.
    """
    spec.validate()
    bx, by = spec.background_motion
    span = spec.frame_count - 1
    pad_x = int(math.ceil(abs(bx) * span)) + 2
    pad_y = int(math.ceil(abs(by) * span)) + 2
    tex = background_texture(spec.background_kind, spec.height + 2 * pad_y,
                             spec.width + 2 * pad_x, spec.background_seed)
    ys, xs = np.mgrid[0:spec.height, 0:spec.width].astype(np.float64)
    color = np.asarray(spec.fence.color, dtype=np.float64)

    fenced, clean, masks = [], [], []
    for t in range(spec.frame_count):
        values, _ = bilinear_sample(tex, xs + pad_x - t * bx, ys + pad_y - t * by)
        frame = Frame(values)
        mask = generate_fence_mask(spec.fence, spec.width, spec.height, spec.rng_seed,
                                   offset=(t * spec.fence_motion[0], t * spec.fence_motion[1]))
        composite = np.where(mask.bits[..., None], color, values)
        clean.append(frame)
        masks.append(mask)
        fenced.append(Frame(composite))
    return fenced, clean, masks
