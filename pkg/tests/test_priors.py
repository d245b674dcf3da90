import numpy as np
import pytest

from unveil import simulate
from unveil.priors import (composite_rough, contrast_transmission,
                           dark_channel, udcp,
                           veil_difference_denominator,
                           veil_difference_transmission)
from conftest import random_image, window_indices


def dark_channel_oracle(img, side, channels=(0, 1, 2)):
    h, w = img.shape[:2]
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            rows, cols = window_indices(i, j, h, w, side)
            out[i, j] = img[np.ix_(rows, cols, list(channels))].min()
    return out


def vdp_oracle(img, amb, side):
    h, w = img.shape[:2]
    den = max(max(1.0 - a, a) for a in amb)
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            rows, cols = window_indices(i, j, h, w, side)
            out[i, j] = np.abs(img[np.ix_(rows, cols)] - amb).max() / den
    return np.clip(out, 0.0, 1.0)


def contrast_oracle(img, side):
    h, w = img.shape[:2]
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            rows, cols = window_indices(i, j, h, w, side)
            win = img[np.ix_(rows, cols)]
            out[i, j] = (win.max(axis=(0, 1)) - win.min(axis=(0, 1))).max()
    return np.clip(out, 0.0, 1.0)


class TestDarkChannel:
    def test_white_image(self):
        img = np.ones((5, 5, 3))
        np.testing.assert_array_equal(dark_channel(img, 3), 1.0)
        np.testing.assert_array_equal(1.0 - dark_channel(img, 3), 0.0)

    def test_zero_channel_pixel(self):
        img = np.ones((5, 5, 3))
        img[2, 2, 1] = 0.0
        assert dark_channel(img, 3)[2, 2] == 0.0
        assert dark_channel(img, 3)[3, 3] == 0.0  # window reaches (2,2)

    def test_brute_force(self, rng):
        img = random_image(rng, 6, 6)
        np.testing.assert_array_equal(dark_channel(img, 3),
                                      dark_channel_oracle(img, 3))


class TestUdcp:
    def test_red_ignored(self):
        img = np.ones((4, 4, 3))
        img[:, :, 0] = 0.0
        np.testing.assert_array_equal(udcp(img, 3), 1.0)

    def test_black(self):
        np.testing.assert_array_equal(udcp(np.zeros((4, 4, 3)), 3), 0.0)

    def test_brute_force(self, rng):
        img = random_image(rng, 6, 6)
        np.testing.assert_array_equal(
            udcp(img, 3), dark_channel_oracle(img, 3, channels=(1, 2)))


class TestVeilDifference:
    def test_white_ambient_equals_one_minus_dark_channel(self, rng):
        img = random_image(rng, 12, 9)
        tv = veil_difference_transmission(img, np.ones(3), 5)
        np.testing.assert_allclose(tv, 1.0 - dark_channel(img, 5),
                                   atol=1e-12)

    def test_image_equal_to_ambient(self):
        amb = np.array([0.3, 0.6, 0.9])
        img = np.broadcast_to(amb, (5, 5, 3)).copy()
        np.testing.assert_array_equal(
            veil_difference_transmission(img, amb, 3), 0.0)

    def test_brute_force(self, rng):
        img = random_image(rng, 6, 6)
        amb = rng.uniform(0.1, 1.0, size=3)
        np.testing.assert_array_equal(
            veil_difference_transmission(img, amb, 3),
            vdp_oracle(img, amb, 3))

    def test_denominator(self):
        assert veil_difference_denominator([0.2, 0.5, 0.6]) == 0.8
        assert veil_difference_denominator(np.ones(3)) == 1.0


class TestContrast:
    def test_constant_image(self):
        img = np.full((5, 5, 3), 0.42)
        np.testing.assert_array_equal(contrast_transmission(img, 3), 0.0)

    def test_full_range_patch(self):
        img = np.full((5, 5, 3), 0.5)
        img[1, 1, 0] = 0.0
        img[1, 2, 0] = 1.0
        assert contrast_transmission(img, 3)[1, 1] == 1.0

    def test_brute_force(self, rng):
        img = random_image(rng, 6, 6)
        np.testing.assert_array_equal(contrast_transmission(img, 3),
                                      contrast_oracle(img, 3))


class TestProperties:
    def test_all_maps_in_unit_range(self, rng):
        for _ in range(5):
            img = random_image(rng, 8, 8)
            amb = rng.uniform(size=3)
            for smap in (dark_channel(img, 3), udcp(img, 3),
                         veil_difference_transmission(img, amb, 3),
                         contrast_transmission(img, 3),
                         composite_rough(img, amb, 3)):
                assert smap.min() >= 0.0 and smap.max() <= 1.0

    def test_uniform_t_contrast_linearity(self, rng):
        img = random_image(rng, 10, 10)
        amb = np.array([0.7, 0.85, 0.95])
        clean = simulate.degrade(img, amb, transmission=1.0)
        for t in (0.25, 0.6, 0.9):
            degraded = simulate.degrade(img, amb, transmission=t)
            np.testing.assert_allclose(
                contrast_transmission(degraded, 5),
                t * contrast_transmission(clean, 5), atol=1e-12)

    @pytest.mark.parametrize("flip", [np.flipud, np.fliplr])
    def test_flip_equivariance(self, rng, flip):
        img = random_image(rng, 7, 9)
        amb = rng.uniform(0.2, 1.0, size=3)
        flipped = flip(img)
        np.testing.assert_array_equal(
            veil_difference_transmission(flipped, amb, 3),
            flip(veil_difference_transmission(img, amb, 3)))
        np.testing.assert_array_equal(contrast_transmission(flipped, 3),
                                      flip(contrast_transmission(img, 3)))
        np.testing.assert_array_equal(dark_channel(flipped, 3),
                                      flip(dark_channel(img, 3)))
        np.testing.assert_array_equal(udcp(flipped, 3),
                                      flip(udcp(img, 3)))
