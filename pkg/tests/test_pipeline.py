import numpy as np
import pytest

from oracles import smooth_texture
from videodefence.core import FenceMask, Frame, SoftMask
from videodefence.errors import NeighborWindowEmpty
from videodefence.mask_refine import RefineParams
from videodefence.metrics import psnr
from videodefence.synth import generate_scene
from videodefence.tv_fusion import (FusionParams, defence_frame, defence_frame_detailed,
                                    refine_sequence_mask)


def soft_from(mask):
    return SoftMask(mask.bits.astype(np.float64))


def test_identical_frames_passthrough():
    frame = Frame(smooth_texture((48, 48, 3), seed=1))
    softs = [SoftMask(np.zeros((48, 48)))] * 4
    out = defence_frame([frame] * 4, softs, 1, fusion=FusionParams(n=3))
    np.testing.assert_array_equal(out.data, frame.data)


def test_fence_free_moving_sequence_is_identity():
    tex = smooth_texture((48, 60, 3), seed=2)
    frames = [Frame(tex[:, 2 * t:2 * t + 48]) for t in range(5)]
    softs = [SoftMask(np.zeros((48, 48)))] * 5
    out = defence_frame(frames, softs, 2)
    assert out.data.tobytes() == frames[2].data.tobytes()


def test_zero_parallax_needs_inpainting():
    frame = np.array(smooth_texture((48, 48, 3), seed=3))
    bits = np.zeros((48, 48), bool)
    bits[20:24, :] = True
    frame[bits] = 0.9
    frames = [Frame(frame)] * 5
    softs = [soft_from(FenceMask(bits))] * 5
    res = defence_frame_detailed(frames, softs, 2, refine=RefineParams(close_radius=0),
                                 fusion=FusionParams(n=4))
    assert res.holes.any()
    assert np.array_equal(res.holes, bits)
    assert not np.allclose(res.frame.data[bits], 0.9)


def test_single_frame_has_no_window():
    frame = Frame(smooth_texture((32, 32, 3), seed=4))
    with pytest.raises(NeighborWindowEmpty):
        defence_frame([frame], [SoftMask(np.zeros((32, 32)))], 0, fusion=FusionParams(n=1))


def test_target_index_checked():
    frame = Frame(smooth_texture((32, 32, 3), seed=4))
    with pytest.raises(IndexError):
        defence_frame([frame] * 2, [SoftMask(np.zeros((32, 32)))] * 2, 5)


def test_refine_sequence_mask_registers_on_masks(parallax_spec):
    fenced, _, masks = generate_scene(parallax_spec)
    softs = [soft_from(m) for m in masks]
    refined = refine_sequence_mask(fenced, softs, 3, RefineParams(close_radius=0))
    assert np.array_equal(refined.bits, masks[3].bits)
    with pytest.raises(ValueError):
        refine_sequence_mask(fenced, softs, 3, register_on="nope")


def test_synthetic_recovery_beats_inpainting(parallax_spec):
    fenced, clean, masks = generate_scene(parallax_spec)
    softs = [soft_from(m) for m in masks]
    target = 3
    res = defence_frame_detailed(fenced, softs, target, fusion=FusionParams(n=4))
    region = masks[target]
    ours = psnr(res.frame, clean[target], region)

    from videodefence.tv_fusion import inpaint_fast_marching
    baseline = psnr(inpaint_fast_marching(fenced[target], region.bits), clean[target], region)
    assert ours >= baseline + 5.0
    assert res.holes.sum() < 0.05 * region.bits.sum()
    assert res.neighbors == [2, 4, 1, 5]
    unfenced = ~region.bits
    assert res.frame.data[unfenced].tobytes() == fenced[target].data[unfenced].tobytes()
