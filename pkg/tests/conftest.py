import numpy as np
import pytest
from scipy import ndimage


def random_image(rng, h, w):
    return rng.uniform(0.0, 1.0, size=(h, w, 3))


def natural_image(rng, h, w):
    """Smooth blobs plus a gradient and mild noise; spans most of [0, 1]."""
    base = ndimage.gaussian_filter(rng.uniform(size=(h, w, 3)),
                                   sigma=(max(2, h // 20), max(2, w // 20), 0))
    lo, hi = base.min(), base.max()
    base = (base - lo) / (hi - lo) if hi > lo else base
    grad = np.linspace(0.05, 0.95, w)[None, :, None]
    img = 0.55 * base + 0.35 * grad + 0.1 * rng.uniform(size=(h, w, 3))
    return np.clip(img, 0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---- brute-force oracles shared across test modules ----

def window_indices(i, j, h, w, side):
    """Clamped (edge-replicated) window coordinates around (i, j)."""
    r = side // 2
    rows = np.clip(np.arange(i - r, i + r + 1), 0, h - 1)
    cols = np.clip(np.arange(j - r, j + r + 1), 0, w - 1)
    return rows, cols


def patch_reduce_oracle(arr2d, side, fn):
    h, w = arr2d.shape
    out = np.empty_like(arr2d)
    for i in range(h):
        for j in range(w):
            rows, cols = window_indices(i, j, h, w, side)
            out[i, j] = fn(arr2d[np.ix_(rows, cols)])
    return out


def box_mean_oracle(arr, side):
    """Mean over the clamped window including replicated duplicates."""
    h, w = arr.shape[:2]
    out = np.empty_like(arr, dtype=np.float64)
    for i in range(h):
        for j in range(w):
            rows, cols = window_indices(i, j, h, w, side)
            out[i, j] = arr[np.ix_(rows, cols)].mean(axis=(0, 1))
    return out
