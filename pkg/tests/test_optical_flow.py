import numpy as np
import pytest

from oracles import dense_irls_system, smooth_texture
from videodefence.core import FenceMask, FlowField, Frame
from videodefence.errors import DimensionMismatch, InputTooSmall
from videodefence.optical_flow import (FlowParams, build_pyramid, downsample_mask, estimate_flow,
                                       flow_energy, smoothness_weights, sor_sweeps,
                                       translation_search, warp_frame, warp_mask)


@pytest.fixture(scope="module")
def translated_pair():
    tex = smooth_texture((140, 140, 3), seed=0)
    target = Frame(tex[:128, 4:132])
    neighbor = Frame(tex[:128, 0:128])  # target content sits 4 px further right
    return target, neighbor


def diagonal_fence(shape=(128, 128), period=10, width=2):
    yy, xx = np.mgrid[0:shape[0], 0:shape[1]]
    return ((xx + yy) % period) < width


# -- pyramid ----------------------------------------------------------------

def test_pyramid_sizes():
    pyr = build_pyramid(np.zeros((64, 64)), FlowParams(min_dimension=16))
    assert pyr.shapes == [(64, 64), (32, 32), (16, 16)]


def test_pyramid_constant_image():
    pyr = build_pyramid(np.full((40, 60), 0.37))
    for level in pyr.levels:
        np.testing.assert_allclose(level, 0.37)


def test_pyramid_stops_at_min_dimension():
    img = np.random.default_rng(0).random((16, 16))
    pyr = build_pyramid(img)
    assert len(pyr) == 1
    np.testing.assert_array_equal(pyr.levels[0], img)


def test_pyramid_too_small():
    with pytest.raises(InputTooSmall):
        build_pyramid(np.zeros((10, 40)))


def test_downsample_mask_is_conservative():
    bits = np.zeros((32, 32), bool)
    bits[5, 9] = True
    coarse = downsample_mask(bits, (16, 16))
    assert coarse.sum() == 1 and coarse[2, 4]


# -- SOR inner solve ------------------------------------------------------------

def test_sor_matches_dense_solve():
    rng = np.random.default_rng(0)
    h = w = 8
    ix, iy, it = rng.standard_normal((3, h, w))
    psi = rng.uniform(0.5, 2.0, (h, w))
    u, v = rng.standard_normal((2, h, w))
    wux, wuy, wvx, wvy = smoothness_weights(u, v, 0.3, 1e-1)
    du = np.zeros((h, w))
    dv = np.zeros((h, w))
    sor_sweeps(ix, iy, it, psi, wux, wuy, wvx, wvy, u, v, du, dv, 1.5, 4000)

    A, b = dense_irls_system(ix, iy, it, psi, wux, wuy, wvx, wvy, u, v)
    direct = np.linalg.solve(A, b)
    ours = np.stack([du.ravel(), dv.ravel()], axis=1).ravel()
    assert np.linalg.norm(ours - direct) <= 1e-6 * np.linalg.norm(direct)


# -- warping ----------------------------------------------------------------------

def test_warp_zero_flow_identity(rng):
    frame = Frame(rng.random((6, 9, 3)))
    warped, valid = warp_frame(frame, FlowField.zeros(6, 9))
    np.testing.assert_array_equal(warped.data, frame.data)
    assert valid.all()


def test_warp_out_of_frame(rng):
    frame = Frame(rng.random((6, 9, 3)))
    _, valid = warp_frame(frame, FlowField.uniform(6, 9, 9, 0))
    assert not valid.any()


def test_warp_integer_shift(rng):
    frame = Frame(rng.random((6, 9, 3)))
    warped, valid = warp_frame(frame, FlowField.uniform(6, 9, 2, 0))
    np.testing.assert_array_equal(warped.data[:, :-2], frame.data[:, 2:])
    assert valid[:, :-2].all() and not valid[:, -2:].any()


def test_warp_dimension_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        warp_frame(Frame(rng.random((6, 9, 3))), FlowField.zeros(6, 8))


def test_warp_mask_tolerance():
    bits = np.zeros((5, 5), bool)
    bits[:, 2] = True
    flow = FlowField.uniform(5, 5, 0.005, 0)
    strict = warp_mask(FenceMask(bits), flow)
    loose = warp_mask(FenceMask(bits), flow, tolerance=0.01)
    assert strict[:, 1].all() and not loose[:, 1].any()


# -- estimation -------------------------------------------------------------------

def test_zero_motion_fixed_point(translated_pair):
    target, _ = translated_pair
    flow = estimate_flow(target, target, FenceMask.empty(*target.shape))
    assert np.hypot(flow.u, flow.v).mean() < 0.05


@pytest.mark.parametrize("search", [0, 8])
def test_pure_translation(translated_pair, search):
    target, neighbor = translated_pair
    flow = estimate_flow(target, neighbor, FenceMask.empty(128, 128),
                         FlowParams(init_search_radius=search))
    epe = np.hypot(flow.u - 4, flow.v)
    assert epe[8:-8, 8:-8].mean() <= 0.25


@pytest.mark.parametrize("search", [0, 8])
def test_masked_translation(translated_pair, search):
    target, neighbor = translated_pair
    fence = diagonal_fence()
    assert abs(fence.mean() - 0.2) < 0.01
    flow = estimate_flow(target, neighbor, FenceMask(fence), FlowParams(init_search_radius=search))
    epe = np.hypot(flow.u - 4, flow.v)
    assert epe[fence].mean() <= 0.5


def test_small_mask_leaves_unmasked_flow_alone(translated_pair):
    target, neighbor = translated_pair
    params = FlowParams(init_search_radius=0)
    free = estimate_flow(target, neighbor, FenceMask.empty(128, 128), params)
    fence = np.zeros((128, 128), bool)
    fence[60:64, 20:100] = True
    masked = estimate_flow(target, neighbor, FenceMask(fence), params)
    diff = np.hypot(free.u - masked.u, free.v - masked.v)
    assert diff[~fence].mean() < 0.1


@pytest.mark.parametrize("fenced", [False, True])
def test_energy_non_increasing_over_outer_warps(translated_pair, fenced):
    target, neighbor = translated_pair
    fence = FenceMask(diagonal_fence() if fenced else np.zeros((128, 128), bool))
    params = FlowParams(init_search_radius=0)
    energies = []

    def record(level, flow):
        if level == 0:
            energies.append(flow_energy(target, neighbor, flow, fence, params.lam))

    estimate_flow(target, neighbor, fence, params, callback=record)
    assert len(energies) == params.outer_warps_per_level
    assert np.all(np.diff(energies) <= 1e-6)


def test_translation_search_ignores_fence():
    tex = smooth_texture((60, 80), seed=5)
    target, neighbor = tex[:, 3:73], tex[:, 0:70]
    fence = np.zeros(target.shape, bool)
    fence[:, ::7] = True
    assert translation_search(target, neighbor, fence, fence, 5) == (3, 0)


def test_flow_is_deterministic(translated_pair):
    target, neighbor = translated_pair
    a = estimate_flow(target, neighbor, FenceMask(diagonal_fence()))
    b = estimate_flow(target, neighbor, FenceMask(diagonal_fence()))
    assert a.u.tobytes() == b.u.tobytes() and a.v.tobytes() == b.v.tobytes()


def test_params_validation():
    for bad in (dict(lam=0), dict(pyramid_scale=1.0), dict(sor_omega=2.0), dict(irls_epsilon=0)):
        with pytest.raises(ValueError):
            FlowParams(**bad)
