"""Image, mask and flow containers plus bilinear sampling.

All containers are frozen dataclasses over read-only numpy arrays, so they
can be shared freely between threads and processes.  Pixel values live in
``[0, 1]``; coordinates follow the image convention ``x`` = column,
``y`` = row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

_RANGE_SLACK = 1e-9


def _frozen(array, dtype):
    out = np.array(array, dtype=dtype, copy=True, order="C")
    out.setflags(write=False)
    return out


def _check_unit_range(values, what):
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite values")
    if values.size and (values.min() < -_RANGE_SLACK or values.max() > 1 + _RANGE_SLACK):
        raise ValueError(f"{what} values must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class Frame:
    """An ``H x W x 3`` RGB image with float channels in ``[0, 1]``."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise DimensionMismatch(f"frame data must be H x W x 3, got {data.shape}")
        _check_unit_range(data, "frame")
        object.__setattr__(self, "data", _frozen(np.clip(data, 0.0, 1.0), np.float64))

    @classmethod
    def from_flat(cls, width: int, height: int, values) -> "Frame":
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.size != width * height * 3:
            raise DimensionMismatch(
                f"expected {width * height * 3} values for {width}x{height} RGB, got {values.size}"
            )
        return cls(values.reshape(height, width, 3))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[:2]


@dataclass(frozen=True, eq=False)
class FenceMask:
    """Boolean ``H x W`` grid, ``True`` marks a fence pixel."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise DimensionMismatch(f"mask must be 2-D, got shape {bits.shape}")
        object.__setattr__(self, "bits", _frozen(bits.astype(bool), bool))

    @classmethod
    def empty(cls, height: int, width: int) -> "FenceMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def to_soft(self) -> "SoftMask":
        return SoftMask(self.bits.astype(np.float64))


@dataclass(frozen=True, eq=False)
class SoftMask:
    """Per-pixel fence scores in ``[0, 1]`` before thresholding."""

    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise DimensionMismatch(f"soft mask must be 2-D, got shape {scores.shape}")
        _check_unit_range(scores, "soft mask")
        object.__setattr__(self, "scores", _frozen(np.clip(scores, 0.0, 1.0), np.float64))

    @property
    def height(self) -> int:
        return self.scores.shape[0]

    @property
    def width(self) -> int:
        return self.scores.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape

    def binarize(self, threshold: float = 0.5) -> FenceMask:
        return FenceMask(self.scores >= threshold)


@dataclass(frozen=True, eq=False)
class FlowField:
    """Dense displacement field; ``(u, v)`` are column and row offsets.

    Components are stored as float32, the precision of the on-disk format.
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.float32)
        v = np.asarray(self.v, dtype=np.float32)
        if u.ndim != 2 or u.shape != v.shape:
            raise DimensionMismatch(f"u and v must be equal 2-D grids, got {u.shape} / {v.shape}")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
            raise ValueError("flow contains non-finite values")
        object.__setattr__(self, "u", _frozen(u, np.float32))
        object.__setattr__(self, "v", _frozen(v, np.float32))

    @classmethod
    def zeros(cls, height: int, width: int) -> "FlowField":
        return cls(np.zeros((height, width)), np.zeros((height, width)))

    @classmethod
    def uniform(cls, height: int, width: int, du: float, dv: float) -> "FlowField":
        return cls(np.full((height, width), du), np.full((height, width), dv))

    @property
    def height(self) -> int:
        return self.u.shape[0]

    @property
    def width(self) -> int:
        return self.u.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.shape


@dataclass(frozen=True)
class Translation:
    """Rigid shift in pixels, ``dx`` along columns and ``dy`` along rows."""

    dx: float
    dy: float

    def __neg__(self) -> "Translation":
        return Translation(-self.dx, -self.dy)


def check_same_shape(*items) -> tuple[int, int]:
    """Return the common ``(height, width)`` of frames/masks/grids or raise."""
    shapes = set()
    for it in items:
        shape = it.shape[:2] if isinstance(it, np.ndarray) else it.shape
        shapes.add(tuple(shape))
    if len(shapes) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(shapes)}")
    return shapes.pop()


def sample_bilinear(frame: Frame, x: float, y: float) -> tuple[np.ndarray, bool]:
    """Bilinearly interpolate ``frame`` at a single point.

    Returns ``(rgb, valid)``.  Points outside ``[0, W-1] x [0, H-1]`` give
    zeros and ``valid=False``.
    """
    values, valid = bilinear_sample(frame.data, np.array([[x]], float), np.array([[y]], float))
    return values[0, 0], bool(valid[0, 0])


def bilinear_sample(image: np.ndarray, xs: np.ndarray, ys: np.ndarray):
    """Vectorised bilinear sampling of a 2-D or 3-D array at ``(xs, ys)``.

    Parameters
    ----------
    image : ndarray, shape (H, W) or (H, W, C)
    xs, ys : ndarray
        Sample coordinates (columns, rows), any common shape.

    Returns
    -------
    values : ndarray
        Interpolated samples, zero where invalid.
    valid : ndarray of bool
        True where the sample point lies inside the pixel grid.
    """
    h, w = image.shape[:2]
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    valid = (xs >= 0) & (xs <= w - 1) & (ys >= 0) & (ys <= h - 1)
    xc = np.where(valid, xs, 0.0)
    yc = np.where(valid, ys, 0.0)
    x0 = np.minimum(np.floor(xc).astype(np.intp), w - 1)
    y0 = np.minimum(np.floor(yc).astype(np.intp), h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    if image.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    top = image[y0, x0] * (1 - fx) + image[y0, x1] * fx
    bottom = image[y1, x0] * (1 - fx) + image[y1, x1] * fx
    out = top * (1 - fy) + bottom * fy
    mask = valid[..., None] if image.ndim == 3 else valid
    return np.where(mask, out, 0.0), valid


def to_grayscale(frame: Frame) -> np.ndarray:
    """Luminance ``0.299 R + 0.587 G + 0.114 B`` as an ``H x W`` array."""
    return np.clip(frame.data @ LUMA_WEIGHTS, 0.0, 1.0)
