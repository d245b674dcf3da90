"""Image I/O, resizing and sliding-window reductions shared by every stage.

Images are float64 arrays of shape (H, W, 3) with values in [0, 1],
channel order RGB. Scalar maps are float64 arrays of shape (H, W).
"""

import warnings

import cv2
import numpy as np
from scipy import ndimage


class ImageIOError(IOError):
    """Raised when a raster file cannot be read or written."""


def load_image(path):
    """Load an 8- or 16-bit RGB raster as a float64 array in [0, 1].

    Integer samples are divided by the sample-type maximum (255 or 65535);
    no gamma transform is applied. Alpha channels are dropped with a warning.
    """
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise ImageIOError(f"cannot read image file: {path}")
    if raw.ndim != 3 or raw.shape[2] not in (3, 4):
        raise ImageIOError(f"not an RGB raster: {path}")
    if raw.shape[0] < 1 or raw.shape[1] < 1:
        raise ImageIOError(f"zero-dimension raster: {path}")
    if raw.shape[2] == 4:
        warnings.warn(f"dropping alpha channel: {path}")
        raw = raw[:, :, :3]
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise ImageIOError(f"unsupported sample type {raw.dtype}: {path}")
    # OpenCV decodes BGR
    return raw[:, :, ::-1].astype(np.float64) / scale


def save_image(image, path):
    """Write an image as lossless 8-bit RGB; values clamped then round(v*255)."""
    image = np.asarray(image, dtype=np.float64)
    data = np.rint(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    if not cv2.imwrite(str(path), data[:, :, ::-1]):
        raise ImageIOError(f"cannot write image file: {path}")


def save_scalar_map(smap, path):
    """Write a scalar map in [0, 1] as an 8-bit grayscale raster."""
    data = np.rint(np.clip(np.asarray(smap, dtype=np.float64), 0.0, 1.0) * 255.0)
    if not cv2.imwrite(str(path), data.astype(np.uint8)):
        raise ImageIOError(f"cannot write image file: {path}")


def save_scalar_csv(smap, path):
    """Write a scalar map as plain-text CSV of floats (exact test artifact)."""
    np.savetxt(str(path), np.asarray(smap, dtype=np.float64), delimiter=",")


def resize_to(arr, width, height):
    """Bilinear resize of an image or scalar map to an exact (width, height)."""
    return cv2.resize(np.asarray(arr, dtype=np.float64), (int(width), int(height)),
                      interpolation=cv2.INTER_LINEAR)


def resize_max_side(image, max_side):
    """Downsample so the longer side equals max_side; no-op if already smaller.

    Aspect ratio is preserved; interpolation is bilinear.
    """
    if max_side < 1:
        raise ValueError("max_side must be >= 1")
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    longest = max(h, w)
    if longest <= max_side:
        return image
    scale = max_side / longest
    new_w = max(1, int(round(w * scale))) if w != longest else max_side
    new_h = max(1, int(round(h * scale))) if h != longest else max_side
    return resize_to(image, new_w, new_h)


def patch_reduce(arr, side, reducer, per_channel=False):
    """Sliding-window min/max centered at each pixel, borders edge-replicated.

    For a 3-channel input with per_channel=False the reduction also runs
    across channels and a 2-D map is returned. Results equal the brute-force
    windowed definition exactly (min/max involve no arithmetic).
    """
    side = int(side)
    if side < 1 or side % 2 == 0:
        raise ValueError("patch side must be odd and >= 1")
    if reducer == "min":
        filt, collapse = ndimage.minimum_filter, np.min
    elif reducer == "max":
        filt, collapse = ndimage.maximum_filter, np.max
    else:
        raise ValueError(f"unknown reducer: {reducer!r}")
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 2:
        return filt(arr, size=side, mode="nearest")
    if arr.ndim == 3:
        if per_channel:
            return filt(arr, size=(side, side, 1), mode="nearest")
        return filt(collapse(arr, axis=2), size=side, mode="nearest")
    raise ValueError("expected a 2-D map or 3-D image")
