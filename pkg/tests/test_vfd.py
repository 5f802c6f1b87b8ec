import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaborvfd.imaging import GrayImage
from gaborvfd.vfd import (
    FractalSignature, edt3_squared, fractal_dimension, fractal_signature, radius_set, volumes,
)

from conftest import random_gray
from oracles import nearest_seed_squared, sums_of_three_squares, union_of_spheres_counts


def test_radius_set_examples():
    assert radius_set(1).squared.tolist() == [1]
    assert radius_set(3).squared.tolist() == [1, 2, 3, 4, 5, 6, 8, 9]
    assert np.allclose(radius_set(3).radii ** 2, radius_set(3).squared)


@pytest.mark.parametrize("r_max", [1, 2, 5, 8, 11, 16, 23])
def test_radius_set_matches_enumeration(r_max):
    assert radius_set(r_max).squared.tolist() == sums_of_three_squares(r_max)


def test_radius_set_sixteen_length():
    assert len(radius_set(16)) == len(sums_of_three_squares(16))


@pytest.mark.parametrize("bad", [0, 65, -3])
def test_radius_set_range(bad):
    with pytest.raises(ValueError):
        radius_set(bad)


def test_single_pixel_column():
    g = edt3_squared(GrayImage(np.array([[5]]), 16), 3)
    z = np.arange(16 + 6)
    assert g.shape == (1, 1, 22)
    assert np.array_equal(g[0, 0], (z - 8) ** 2)


def test_flat_image_distances_are_vertical():
    g = edt3_squared(GrayImage(np.full((5, 7), 9), 16), 4)
    z = np.arange(24)
    assert g.shape == (5, 7, 24)
    assert np.array_equal(g, np.broadcast_to((z - 13) ** 2, g.shape))


def test_edt_matches_exhaustive_oracle_100_instances():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        img = random_gray(rng, 8, 8, levels=16)
        got = edt3_squared(img, 3)
        ref = nearest_seed_squared(img.pixels, 16, 3)
        assert np.array_equal(got, ref)


def test_edt_nonsquare_and_rugged(rng):
    for h, w in ((1, 9), (9, 1), (5, 11), (12, 4)):
        img = random_gray(rng, h, w, levels=32)
        assert np.array_equal(edt3_squared(img, 5), nearest_seed_squared(img.pixels, 32, 5))


def test_volumes_flat_closed_forms():
    img = GrayImage(np.full((6, 9), 100), 256)
    rs = radius_set(4)
    V = volumes(edt3_squared(img, 4), rs)
    by_sq = dict(zip(rs.squared.tolist(), V.tolist()))
    assert by_sq[4] == 6 * 9 * 5
    assert by_sq[2] == 6 * 9 * 3
    for sq, v in by_sq.items():
        assert v == 6 * 9 * (2 * math.isqrt(sq) + 1)


def test_volumes_match_union_of_spheres(rng):
    for _ in range(5):
        img = random_gray(rng, 8, 8, levels=16)
        rs = radius_set(3)
        got = volumes(edt3_squared(img, 3), rs)
        ref = union_of_spheres_counts(img.pixels, 16, 3, rs.squared)
        assert np.array_equal(got, ref)


def test_signature_flat_closed_form():
    sig = fractal_signature(GrayImage(np.full((10, 10), 50)), r_max=5)
    expected = np.log(100 * (2 * np.floor(sig.radii) + 1))
    assert np.allclose(sig.log_volumes, expected, rtol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_signature_monotone_and_bounded(h, w, r_max, seed):
    img = random_gray(np.random.default_rng(seed), h, w)
    sig = fractal_signature(img, r_max)
    assert len(sig) == len(radius_set(r_max))
    assert np.all(np.diff(sig.volumes) >= 0) and sig.volumes[0] > 0
    assert sig.volumes[-1] <= h * w * (256 + 2 * r_max)


def test_signature_default_radius_is_sixteen(rng):
    sig = fractal_signature(random_gray(rng, 6, 6))
    assert sig.r_max == 16 and len(sig) == len(sums_of_three_squares(16))


def test_intensity_shift_invariance(rng):
    px = rng.integers(0, 200, (9, 9))
    a = fractal_signature(GrayImage(px), 6)
    b = fractal_signature(GrayImage(px + 55), 6)
    assert np.array_equal(a.volumes, b.volumes)


def test_flat_large_image_dimension_near_two():
    sig = fractal_signature(GrayImage(np.full((128, 128), 128)), 16)
    assert abs(fractal_dimension(sig) - 2) <= 0.15


def test_dimension_synthetic_slopes():
    sq = np.array([1, 2, 3, 4, 5])
    r = np.sqrt(sq)
    steep = FractalSignature(3, sq, np.zeros(5), 3 * np.log(r) + 1.7)
    flat = FractalSignature(3, sq, np.zeros(5), np.full(5, 4.2))
    assert fractal_dimension(steep) == pytest.approx(0.0, abs=1e-12)
    assert fractal_dimension(flat) == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ValueError):
        fractal_dimension(FractalSignature(1, sq[:1], np.ones(1), np.zeros(1)))


def test_signature_csv(rng):
    text = fractal_signature(random_gray(rng, 5, 5), 3).to_csv().splitlines()
    assert text[0] == "r,sq_r,V,lnV"
    assert len(text) == 9
    r, sq, v, lv = text[2].split(",")
    assert sq == "2" and float(r) == pytest.approx(math.sqrt(2)) and float(lv) == pytest.approx(math.log(int(v)))


def test_edt_rejects_deep_surfaces():
    with pytest.raises(ValueError):
        edt3_squared(GrayImage(np.zeros((2, 2), int), 1024), 3)
