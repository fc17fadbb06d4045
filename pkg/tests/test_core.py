import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from videodefence.core import (FenceMask, FlowField, Frame, SoftMask, sample_bilinear,
                               to_grayscale)
from videodefence.errors import DimensionMismatch


@pytest.fixture
def frame(rng):
    return Frame(rng.random((5, 7, 3)))


def test_integer_coordinates_return_stored_pixel(frame):
    for y in range(frame.height):
        for x in range(frame.width):
            rgb, valid = sample_bilinear(frame, x, y)
            assert valid
            np.testing.assert_array_equal(rgb, frame.data[y, x])


def test_midpoint_interpolates_linearly():
    data = np.zeros((2, 2, 3))
    data[:, 1] = 1.0
    rgb, valid = sample_bilinear(Frame(data), 0.5, 0)
    assert valid
    np.testing.assert_allclose(rgb, 0.5)


@pytest.mark.parametrize("x, y", [(-0.5, 0), (0, -0.01), (6.01, 0), (0, 4.5)])
def test_out_of_bounds_is_invalid_zero(frame, x, y):
    rgb, valid = sample_bilinear(frame, x, y)
    assert not valid
    np.testing.assert_array_equal(rgb, 0.0)


def test_far_corner_is_valid(frame):
    rgb, valid = sample_bilinear(frame, frame.width - 1, frame.height - 1)
    assert valid
    np.testing.assert_array_equal(rgb, frame.data[-1, -1])


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 6), st.floats(0, 4), st.floats(-1e-4, 1e-4))
def test_sampling_is_continuous(x, y, eps):
    frame = Frame(np.random.default_rng(0).random((5, 7, 3)))
    a, _ = sample_bilinear(frame, x, y)
    b, valid = sample_bilinear(frame, min(max(x + eps, 0), 6), y)
    assert valid
    # Lipschitz constant of bilinear interpolation of [0,1] data is at most 2
    assert np.all(np.abs(a - b) <= 2 * abs(eps) + 1e-12)


@pytest.mark.parametrize("value, expected", [((1, 1, 1), 1.0), ((0, 0, 0), 0.0), ((1, 0, 0), 0.299)])
def test_grayscale_constants(value, expected):
    gray = to_grayscale(Frame(np.broadcast_to(np.array(value, float), (3, 4, 3))))
    np.testing.assert_allclose(gray, expected, atol=1e-15)


def test_grayscale_between_channel_extremes(rng):
    frame = Frame(rng.random((8, 8, 3)))
    gray = to_grayscale(frame)
    assert np.all(gray >= frame.data.min(axis=-1) - 1e-12)
    assert np.all(gray <= frame.data.max(axis=-1) + 1e-12)


def test_frame_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        Frame.from_flat(2, 2, np.zeros(11))
    with pytest.raises(DimensionMismatch):
        Frame(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        Frame(np.full((2, 2, 3), 1.5))
    with pytest.raises(ValueError):
        Frame(np.full((2, 2, 3), np.nan))


def test_from_flat_is_row_major():
    f = Frame.from_flat(2, 1, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    np.testing.assert_array_equal(f.data[0, 1], [0.4, 0.5, 0.6])
    assert (f.width, f.height) == (2, 1)


def test_containers_are_immutable(frame):
    with pytest.raises(ValueError):
        frame.data[0, 0, 0] = 0.5
    mask = FenceMask(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        mask.bits[0, 0] = True


def test_soft_mask_range_and_flow_finiteness():
    with pytest.raises(ValueError):
        SoftMask(np.full((2, 2), -0.2))
    with pytest.raises(ValueError):
        FlowField(np.full((2, 2), np.inf), np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        FlowField(np.zeros((2, 2)), np.zeros((2, 3)))
