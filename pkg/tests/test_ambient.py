import numpy as np
import pytest

from unveil.ambient import (AMBIENT_FLOOR, brightest_pixel,
                            parse_ambient_spec, resolve_ambient,
                            shades_of_gray)
from conftest import random_image


class TestShadesOfGray:
    @pytest.mark.parametrize("p", [1, 2, 6, 20])
    def test_constant_image(self, p):
        img = np.full((4, 5, 3), 0.6)
        np.testing.assert_allclose(shades_of_gray(img, p), 0.6)

    def test_two_sample_closed_form(self):
        img = np.zeros((2, 1, 3))
        img[1] = 1.0
        np.testing.assert_allclose(shades_of_gray(img, 1), 0.5)
        np.testing.assert_allclose(shades_of_gray(img, 2), np.sqrt(0.5))

    def test_black_image_clamped_to_floor(self):
        np.testing.assert_allclose(
            shades_of_gray(np.zeros((3, 3, 3)), 6), AMBIENT_FLOOR)

    def test_monotone_in_p(self, rng):
        img = random_image(rng, 8, 8)
        prev = shades_of_gray(img, 1)
        for p in (2, 4, 8, 16):
            cur = shades_of_gray(img, p)
            assert np.all(cur >= prev - 1e-12)
            prev = cur

    def test_permutation_invariant(self, rng):
        img = random_image(rng, 6, 6)
        flat = img.reshape(-1, 3)
        shuffled = flat[rng.permutation(len(flat))].reshape(img.shape)
        np.testing.assert_allclose(shades_of_gray(img, 6),
                                   shades_of_gray(shuffled, 6), atol=1e-12)

    def test_channel_scaling(self, rng):
        img = 0.2 + 0.7 * random_image(rng, 6, 6)  # away from the clamp
        scaled = img.copy()
        scaled[:, :, 1] *= 0.5
        a, b = shades_of_gray(img, 6), shades_of_gray(scaled, 6)
        np.testing.assert_allclose(b[1], 0.5 * a[1], rtol=1e-10)
        np.testing.assert_allclose(b[[0, 2]], a[[0, 2]])

    def test_p_below_one_rejected(self):
        with pytest.raises(ValueError):
            shades_of_gray(np.zeros((2, 2, 3)), 0.5)


class TestBrightestPixel:
    def test_constant(self):
        img = np.full((3, 3, 3), 0.7)
        np.testing.assert_allclose(brightest_pixel(img, 0.5), 0.7)

    def test_single_white_pixel(self):
        img = np.zeros((5, 2, 3))
        img[2, 1] = 1.0
        np.testing.assert_allclose(brightest_pixel(img, 1 / 10), 1.0)

    def test_matches_sort_oracle(self, rng):
        img = random_image(rng, 10, 1)
        flat = img.reshape(-1, 3)
        order = np.argsort(flat.mean(axis=1))
        want = flat[order[-2:]].mean(axis=0)  # top 2 of 10 pixels
        np.testing.assert_allclose(brightest_pixel(img, 0.2), want)

    def test_permutation_invariant(self, rng):
        img = random_image(rng, 8, 4)
        flat = img.reshape(-1, 3)
        shuffled = flat[rng.permutation(len(flat))].reshape(img.shape)
        np.testing.assert_allclose(brightest_pixel(img, 0.3),
                                   brightest_pixel(shuffled, 0.3), atol=1e-12)

    def test_bad_quantile(self):
        with pytest.raises(ValueError):
            brightest_pixel(np.zeros((2, 2, 3)), 0.0)


class TestParseAmbientSpec:
    def test_auto(self):
        assert parse_ambient_spec("auto") == ("sog", None)

    def test_bright(self):
        assert parse_ambient_spec("bright:0.01") == ("bright", 0.01)

    def test_literal(self):
        kind, rgb = parse_ambient_spec("0.8,0.9,1.0")
        assert kind == "literal"
        np.testing.assert_allclose(rgb, [0.8, 0.9, 1.0])

    @pytest.mark.parametrize("bad", ["0.5,0.5", "1.5,0.5,0.5", "bright:2"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_ambient_spec(bad)

    def test_resolve(self, rng):
        img = random_image(rng, 4, 4)
        np.testing.assert_allclose(
            resolve_ambient(img, ("sog", None), 6), shades_of_gray(img, 6))
        np.testing.assert_allclose(
            resolve_ambient(img, ("literal", [0.0, 0.5, 1.0])),
            [AMBIENT_FLOOR, 0.5, 1.0])
