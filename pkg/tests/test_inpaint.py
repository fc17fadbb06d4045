import numpy as np
import pytest

from videodefence.core import Frame
from videodefence.errors import AllHoles
from videodefence.tv_fusion import inpaint_fast_marching


def test_no_holes_unchanged(rng):
    frame = Frame(rng.random((6, 6, 3)))
    out = inpaint_fast_marching(frame, np.zeros((6, 6), bool))
    np.testing.assert_array_equal(out.data, frame.data)


def test_single_hole_constant():
    frame = np.full((7, 7, 3), 0.3)
    frame[3, 3] = 0.9
    holes = np.zeros((7, 7), bool)
    holes[3, 3] = True
    out = inpaint_fast_marching(Frame(frame), holes)
    np.testing.assert_allclose(out.data[3, 3], 0.3, atol=1e-12)


def test_gradient_hole():
    xs = np.linspace(0.1, 0.9, 20)
    frame = np.repeat(np.repeat(xs[None, :, None], 12, 0), 3, 2)
    holes = np.zeros((12, 20), bool)
    holes[6, 9:12] = True
    damaged = frame.copy()
    damaged[holes] = 0.0
    out = inpaint_fast_marching(Frame(damaged), holes)
    assert np.max(np.abs(out.data[holes] - frame[holes])) <= 0.05


def test_large_hole_bounded_and_known_pixels_kept(rng):
    frame = Frame(rng.random((24, 24, 3)))
    holes = np.zeros((24, 24), bool)
    holes[6:18, 8:14] = True
    out = inpaint_fast_marching(frame, holes)
    np.testing.assert_array_equal(out.data[~holes], frame.data[~holes])
    assert out.data[holes].min() >= 0 and out.data[holes].max() <= 1


def test_errors(rng):
    frame = Frame(rng.random((4, 4, 3)))
    with pytest.raises(AllHoles):
        inpaint_fast_marching(frame, np.ones((4, 4), bool))
    with pytest.raises(ValueError):
        inpaint_fast_marching(frame, np.zeros((4, 4), bool), radius=0)
