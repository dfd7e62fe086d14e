import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contourflow import boundary_distance, dice_score, segmentation_report

from oracles import brute_bd_bdsd, random_mask


def _square(shape, r0, c0, side):
    g = np.zeros(shape, dtype=np.uint8)
    g[r0 : r0 + side, c0 : c0 + side] = 1
    return g


def test_dice_identity_and_disjoint():
    a = _square((10, 10), 1, 1, 4)
    assert dice_score(a, a) == 100.0
    b = _square((10, 10), 6, 6, 3)
    assert dice_score(a, b) == 0.0


def test_dice_both_empty_is_hundred():
    z = np.zeros((5, 5), dtype=np.uint8)
    assert dice_score(z, z) == 100.0


def test_dice_shifted_square_is_75():
    a = _square((12, 12), 4, 4, 4)
    b = _square((12, 12), 4, 5, 4)  # shift one column: overlap 12 of 16
    assert dice_score(a, b) == 75.0


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_dice_symmetry(seed):
    r = np.random.default_rng(seed)
    a = (r.random((7, 7)) < 0.5).astype(np.uint8)
    b = (r.random((7, 7)) < 0.5).astype(np.uint8)
    assert dice_score(a, b) == dice_score(b, a)


def test_boundary_distance_identity():
    a = _square((9, 9), 2, 2, 5)
    assert boundary_distance(a, a) == (0.0, 0.0)


def test_boundary_distance_concentric_squares():
    outer = _square((32, 32), 6, 6, 20)
    inner = _square((32, 32), 10, 10, 12)
    bd, bdsd = boundary_distance(inner, outer)
    assert bdsd < bd  # corners deviate, faces dominate
    assert abs(bd - 4.0) <= 0.4  # uniform 4 px gap along each face
    np.testing.assert_allclose(
        boundary_distance(inner, outer), brute_bd_bdsd(inner, outer), atol=1e-9
    )


def test_bdsd_zero_iff_equidistant():
    gt = _square((15, 15), 3, 3, 9)
    lone = np.zeros((15, 15), dtype=np.uint8)
    lone[7, 7] = 1  # single boundary pixel: one distance value
    assert boundary_distance(lone, gt)[1] == 0.0
    shifted = _square((15, 15), 4, 3, 9)  # mixed distances
    assert boundary_distance(shifted, gt)[1] > 0.0


def test_boundary_distance_is_directional():
    big = _square((24, 24), 4, 4, 16)
    small = _square((24, 24), 10, 10, 4)
    ab = boundary_distance(small, big)
    ba = boundary_distance(big, small)
    assert ab != ba


def test_boundary_distance_matches_brute_force(rng):
    for _ in range(15):
        pred = random_mask(rng, (11, 13))
        gt = random_mask(rng, (11, 13))
        np.testing.assert_allclose(
            boundary_distance(pred, gt), brute_bd_bdsd(pred, gt), atol=1e-9
        )


def test_boundary_distance_matches_brute_force_3d(rng):
    for _ in range(4):
        pred = random_mask(rng, (6, 7, 5))
        gt = random_mask(rng, (6, 7, 5))
        np.testing.assert_allclose(
            boundary_distance(pred, gt), brute_bd_bdsd(pred, gt), atol=1e-9
        )


def test_boundary_distance_rejects_empty_boundaries():
    gt = _square((8, 8), 2, 2, 3)
    empty = np.zeros((8, 8), dtype=np.uint8)
    with pytest.raises(ValueError):
        boundary_distance(empty, gt)
    with pytest.raises(ValueError):
        boundary_distance(gt, empty)


def test_segmentation_report_keys():
    a = _square((10, 10), 2, 2, 5)
    rep = segmentation_report(a, a)
    assert rep["dice_percent"] == 100.0
    assert rep["bd"] == 0.0 and rep["bdsd"] == 0.0
    assert rep["aux"]["pred_pixels"] == 25
    assert rep["aux"]["gt_boundary_pixels"] == 16
