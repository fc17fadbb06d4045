"""File interchange: PNG frames and masks, binary flow files, and flat
``key = value`` configuration / scene files."""
from __future__ import annotations

import re
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .core import FenceMask, FlowField, Frame, SoftMask
from .errors import (BadMagic, ConfigError, DecodeError, MissingFrames, NonContiguousIndices,
                     TruncatedFile)
from .mask_refine import RefineParams
from .optical_flow import FlowParams
from .synth import FenceSpec, SceneSpec
from .tv_fusion.fuse import FusionParams

FLOW_MAGIC = 202021.25
_HEADER = struct.Struct("<fii")

FRAME_PREFIX = "frame"
MASK_PREFIX = "mask"


# -- images -----------------------------------------------------------------

def _open_png(path, mode):
    try:
        with Image.open(path) as img:
            img.load()
            return np.asarray(img.convert(mode))
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc


def _to_bytes(values):
    # round half to even
    return np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)


def load_frame(path) -> Frame:
    return Frame(_open_png(path, "RGB").astype(np.float64) / 255.0)


def save_frame(frame: Frame, path) -> None:
    Image.fromarray(_to_bytes(frame.data), mode="RGB").save(path, format="PNG")


def load_mask(path) -> FenceMask:
    return FenceMask(_open_png(path, "L") >= 128)


def save_mask(mask: FenceMask, path) -> None:
    Image.fromarray(mask.bits.astype(np.uint8) * 255, mode="L").save(path, format="PNG")


def load_soft_mask(path) -> SoftMask:
    return SoftMask(_open_png(path, "L").astype(np.float64) / 255.0)


def save_soft_mask(mask: SoftMask, path) -> None:
    Image.fromarray(_to_bytes(mask.scores), mode="L").save(path, format="PNG")


def sequence_paths(directory, prefix: str = FRAME_PREFIX) -> list[Path]:
    """Paths of ``<prefix>_NNNNN.png`` files in index order.

    Raises ``MissingFrames`` if none exist and ``NonContiguousIndices`` if
    the indices are not exactly ``0 .. N-1``.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise MissingFrames(f"{directory} is not a directory")
    pattern = re.compile(rf"^{re.escape(prefix)}_(\d{{5,}})\.png$")
    found = {}
    for entry in directory.iterdir():
        match = pattern.match(entry.name)
        if match:
            found[int(match.group(1))] = entry
    if not found:
        raise MissingFrames(f"no {prefix}_%05d.png files in {directory}")
    indices = sorted(found)
    if indices != list(range(len(indices))):
        missing = sorted(set(range(indices[-1] + 1)) - set(indices))
        raise NonContiguousIndices(f"{prefix} indices in {directory} have gaps at {missing[:10]}")
    return [found[i] for i in indices]


def sequence_name(index: int, prefix: str = FRAME_PREFIX) -> str:
    return f"{prefix}_{index:05d}.png"


def load_sequence(directory) -> list[Frame]:
    return [load_frame(p) for p in sequence_paths(directory, FRAME_PREFIX)]


def load_mask_sequence(directory, soft: bool = False) -> list:
    loader = load_soft_mask if soft else load_mask
    return [loader(p) for p in sequence_paths(directory, MASK_PREFIX)]


def save_sequence(frames, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames):
        save_frame(frame, directory / sequence_name(i))


def save_mask_sequence(masks, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for i, mask in enumerate(masks):
        save_mask(mask, directory / sequence_name(i, MASK_PREFIX))


# -- flow -------------------------------------------------------------------

def write_flow(path, flow: FlowField) -> None:
    """Write the little-endian ``.flo`` layout: magic, width, height, (u, v) pairs."""
    h, w = flow.shape
    payload = np.empty((h, w, 2), dtype="<f4")
    payload[..., 0] = flow.u
    payload[..., 1] = flow.v
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FLOW_MAGIC, w, h))
        fh.write(payload.tobytes())


def read_flow(path) -> FlowField:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TruncatedFile(f"{path}: header needs {_HEADER.size} bytes, file has {len(data)}")
    magic, w, h = _HEADER.unpack_from(data)
    if magic != FLOW_MAGIC:
        raise BadMagic(f"{path}: bad flow magic {magic!r}")
    if w < 0 or h < 0:
        raise DecodeError(f"{path}: negative dimensions {w}x{h}")
    expected = _HEADER.size + 8 * w * h
    if len(data) < expected:
        raise TruncatedFile(f"{path}: expected {expected} bytes, found {len(data)}")
    payload = np.frombuffer(data, dtype="<f4", count=2 * w * h, offset=_HEADER.size)
    payload = payload.reshape(h, w, 2)
    return FlowField(payload[..., 0], payload[..., 1])


# -- key = value files --------------------------------------------------------

def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _as_bool(text):
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _as_floats(count):
    def convert(text):
        parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
        if len(parts) != count:
            raise ValueError(f"expected {count} numbers, got {text!r}")
        return tuple(float(p) for p in parts)
    return convert


def _as_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


# config key -> (section, field name, converter)
PIPELINE_KEYS = {
    "m": ("refine", "m", _as_int),
    "mu": ("refine", "mu", float),
    "close_radius": ("refine", "close_radius", _as_int),
    "close_iterations": ("refine", "close_iterations", _as_int),
    "lambda_flow": ("flow", "lam", float),
    "pyramid_scale": ("flow", "pyramid_scale", float),
    "min_dimension": ("flow", "min_dimension", _as_int),
    "outer_warps_per_level": ("flow", "outer_warps_per_level", _as_int),
    "irls_iterations": ("flow", "irls_iterations", _as_int),
    "sor_iterations": ("flow", "sor_iterations", _as_int),
    "sor_omega": ("flow", "sor_omega", float),
    "irls_epsilon": ("flow", "irls_epsilon", float),
    "median_filter": ("flow", "median_filter", _as_bool),
    "init_search_radius": ("flow", "init_search_radius", _as_int),
    "n": ("fusion", "n", _as_int),
    "lambda_fusion": ("fusion", "lambda_fusion", float),
    "prox_max_passes": ("fusion", "prox_max_passes", _as_int),
    "prox_tolerance": ("fusion", "prox_tolerance", float),
    "renormalize": ("fusion", "renormalize", _as_bool),
    "inpaint_radius": ("fusion", "inpaint_radius", _as_int),
    "visibility_tolerance": ("fusion", "visibility_tolerance", float),
}

SCENE_KEYS = {
    "width": ("scene", "width", _as_int),
    "height": ("scene", "height", _as_int),
    "frame_count": ("scene", "frame_count", _as_int),
    "background_kind": ("scene", "background_kind", str),
    "background_seed": ("scene", "background_seed", _as_int),
    "background_motion": ("scene", "background_motion", _as_floats(2)),
    "fence_motion": ("scene", "fence_motion", _as_floats(2)),
    "rng_seed": ("scene", "rng_seed", _as_int),
    "fence_pattern": ("fence", "pattern", str),
    "wire_width": ("fence", "wire_width", float),
    "cell_size": ("fence", "cell_size", float),
    "rotation": ("fence", "rotation", float),
    "fence_color": ("fence", "color", _as_floats(3)),
    "irregularity": ("fence", "irregularity", float),
}


def _convert(pairs, schema):
    sections: dict[str, dict] = {}
    unknown = sorted(set(pairs) - set(schema))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    for key, text in pairs.items():
        section, name, convert = schema[key]
        try:
            sections.setdefault(section, {})[name] = convert(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from exc
    return sections


def parse_pipeline_config(text: str) -> tuple[RefineParams, FlowParams, FusionParams]:
    sections = _convert(parse_key_values(text), PIPELINE_KEYS)
    try:
        return (RefineParams(**sections.get("refine", {})),
                FlowParams(**sections.get("flow", {})),
                FusionParams(**sections.get("fusion", {})))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_pipeline_config(path):
    return parse_pipeline_config(Path(path).read_text(encoding="utf-8"))


def parse_scene_spec(text: str) -> SceneSpec:
    """Build a :class:`SceneSpec` from ``key = value`` text.

    Vectors are comma- or space-separated, e.g. ``background_motion = 2, 0``.
    Validation of the resulting spec is left to the generator.
    """
    sections = _convert(parse_key_values(text), SCENE_KEYS)
    fence = FenceSpec(**sections.get("fence", {}))
    return SceneSpec(fence=fence, **sections.get("scene", {}))


def load_scene_spec(path) -> SceneSpec:
    return parse_scene_spec(Path(path).read_text(encoding="utf-8"))


def dump_scene_spec(spec: SceneSpec) -> str:
    values = {**asdict(spec), **{f"fence.{k}": v for k, v in asdict(spec.fence).items()}}
    lines = []
    for key, (section, name, _) in SCENE_KEYS.items():
        value = values[name if section == "scene" else f"fence.{name}"]
        if isinstance(value, (tuple, list)):
            value = ", ".join(repr(float(v)) for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
