import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from videodefence.core import FenceMask, SoftMask, Translation
from videodefence.errors import DimensionMismatch
from videodefence.mask_refine import RefineParams, morph_close, refine_mask


def lattice(h=24, w=24, spacing=6):
    bits = np.zeros((h, w), bool)
    bits[::spacing] = True
    bits[:, ::spacing] = True
    return bits


def test_close_radius_zero_is_identity(rng):
    mask = FenceMask(rng.random((10, 10)) > 0.5)
    np.testing.assert_array_equal(morph_close(mask, 0).bits, mask.bits)


def test_close_fills_single_hole():
    bits = np.zeros((9, 9), bool)
    bits[2:7, 2:7] = True
    bits[4, 4] = False
    closed = morph_close(FenceMask(bits), 1).bits
    assert closed[4, 4]
    np.testing.assert_array_equal(closed[2:7, 2:7], True)


def test_close_empty_stays_empty():
    assert not morph_close(FenceMask.empty(6, 6), 3).bits.any()


def test_close_keeps_border_pixels():
    bits = np.zeros((6, 6), bool)
    bits[0, :] = True
    bits[:, -1] = True
    closed = morph_close(FenceMask(bits), 2).bits
    assert np.all(closed[bits])


@settings(max_examples=40, deadline=None)
@given(arrays(bool, (12, 12)), st.integers(1, 2))
def test_close_idempotent_and_extensive(bits, radius):
    once = morph_close(FenceMask(bits), radius, 1)
    twice = morph_close(once, radius, 1)
    np.testing.assert_array_equal(once.bits, twice.bits)
    assert np.all(once.bits[bits])


def test_single_identical_neighbor_equals_closing():
    bits = lattice()
    soft = SoftMask(bits.astype(float))
    out = refine_mask(soft, FenceMask(bits), [soft], [Translation(0, 0)], RefineParams(m=1, mu=0.5))
    np.testing.assert_array_equal(out.bits, morph_close(FenceMask(bits), 1).bits)


def test_zero_neighbor_scores_give_closed_target():
    bits = lattice()
    zeros = SoftMask(np.zeros(bits.shape))
    out = refine_mask(zeros, FenceMask(bits), [zeros] * 3, [Translation(0, 0)] * 3)
    np.testing.assert_array_equal(out.bits, morph_close(FenceMask(bits), 1).bits)


def test_missing_pixel_recovered_from_five_neighbors():
    truth = lattice(spacing=8)
    target = truth.copy()
    target[8, 12] = False  # interior pixel on a wire, dropped by the detector
    soft = SoftMask(truth.astype(float))
    params = RefineParams(m=5, mu=0.5, close_radius=0)
    out = refine_mask(SoftMask(target.astype(float)), FenceMask(target), [soft] * 5,
                      [Translation(0, 0)] * 5, params)
    assert out.bits[8, 12]
    np.testing.assert_array_equal(out.bits, truth)


def test_neighbors_are_warped_before_averaging():
    truth = lattice(spacing=8)
    moved = np.roll(truth, 2, axis=1)  # neighbour sees the fence two columns right
    target = truth.copy()
    target[:, 8] = False
    out = refine_mask(SoftMask(target.astype(float)), FenceMask(target),
                      [SoftMask(moved.astype(float))], [Translation(-2, 0)],
                      RefineParams(m=1, close_radius=0))
    assert out.bits[3:20, 8].all()


def test_no_neighbors_is_lenient():
    bits = lattice()
    out = refine_mask(SoftMask(bits.astype(float)), FenceMask(bits), [], [], RefineParams(m=0))
    np.testing.assert_array_equal(out.bits, morph_close(FenceMask(bits), 1).bits)


def test_errors():
    bits = lattice()
    soft = SoftMask(bits.astype(float))
    with pytest.raises(DimensionMismatch):
        refine_mask(soft, FenceMask(bits), [SoftMask(np.zeros((5, 5)))], [Translation(0, 0)])
    with pytest.raises(ValueError):
        refine_mask(soft, FenceMask(bits), [soft] * 2, [Translation(0, 0)] * 2, RefineParams(m=1))
    with pytest.raises(ValueError):
        RefineParams(mu=0)


def _random_fixture(seed):
    rng = np.random.default_rng(seed)
    target = rng.random((20, 20)) > 0.8
    softs = [SoftMask(rng.random((20, 20))) for _ in range(5)]
    shifts = [Translation(*rng.uniform(-2, 2, 2)) for _ in range(5)]
    return target, softs, shifts


@pytest.mark.parametrize("seed", range(10))
def test_superset_and_mu_monotonicity(seed):
    target, softs, shifts = _random_fixture(seed)
    base = morph_close(FenceMask(target), 1).bits
    outputs = []
    for mu in (0.3, 0.5, 0.7):
        out = refine_mask(SoftMask(target.astype(float)), FenceMask(target), softs, shifts,
                          RefineParams(mu=mu)).bits
        assert np.all(out[base])
        outputs.append(out)
    assert np.all(outputs[0][outputs[1]]) and np.all(outputs[1][outputs[2]])


def test_deterministic():
    target, softs, shifts = _random_fixture(3)
    a = refine_mask(SoftMask(target.astype(float)), FenceMask(target), softs, shifts)
    b = refine_mask(SoftMask(target.astype(float)), FenceMask(target), softs, shifts)
    assert a.bits.tobytes() == b.bits.tobytes()
