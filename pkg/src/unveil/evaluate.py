"""Quantitative evaluation: MSE-vs-degradation curves and corpus-level
prior histograms."""

import dataclasses
import warnings
from pathlib import Path

import numpy as np

from . import priors
from .ambient import shades_of_gray, DEFAULT_SOG_P
from .image_io import ImageIOError, load_image, resize_max_side
from .restore import restore_pipeline

PRIOR_KINDS = ("vdp", "contrast", "dcp", "udcp", "composite")


def mse(a, b):
    """Mean squared error over all pixels and channels."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def mse_curve(frames, reference, levels=None, pipeline_config=None,
              estimate_ambient=False):
    """MSE of each frame against a fixed reference image.

    With pipeline_config=None the raw degraded frames are scored (the
    unrestored baseline). Otherwise each frame is restored first; with
    estimate_ambient=True the configured ambient is replaced per frame by
    a shades-of-gray estimate.
    """
    frames = list(frames)
    if levels is None:
        levels = list(range(len(frames)))
    if len(levels) != len(frames):
        raise ValueError("levels and frames lengths disagree")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    points = []
    for level, frame in zip(levels, frames):
        if pipeline_config is None:
            scored = frame
        else:
            cfg = dataclasses.replace(pipeline_config)
            if estimate_ambient:
                cfg.ambient = ("sog", None)
            scored = restore_pipeline(frame, cfg).restored
        points.append((level, mse(scored, reference)))
    return points


def map_histogram(smap, bins=256):
    """Normalized histogram of a [0,1] map; v lands in min(bins-1, floor(v*bins))."""
    idx = np.minimum(bins - 1,
                     np.floor(np.asarray(smap, dtype=np.float64) * bins)
                     .astype(np.int64))
    counts = np.bincount(idx.ravel(), minlength=bins).astype(np.float64)
    return counts / counts.sum()


def prior_map(image, kind, patch=15, sog_p=DEFAULT_SOG_P, ambient=None):
    """Prior map for statistics; DCP/UDCP are returned as 1 - value
    (plotting convention so that haze-free responds high)."""
    if kind == "dcp":
        return 1.0 - priors.dark_channel(image, patch)
    if kind == "udcp":
        return 1.0 - priors.udcp(image, patch)
    if ambient is None:
        ambient = shades_of_gray(image, sog_p)
    if kind == "vdp":
        return priors.veil_difference_transmission(image, ambient, patch)
    if kind == "contrast":
        return priors.contrast_transmission(image, patch)
    if kind == "composite":
        return priors.composite_rough(image, ambient, patch)
    raise ValueError(f"unknown prior kind: {kind!r}")


def _iter_corpus(corpus):
    if isinstance(corpus, (str, Path)):
        root = Path(corpus)
        paths = sorted(p for p in root.iterdir() if p.is_file())
        for path in paths:
            try:
                yield load_image(path)
            except ImageIOError as exc:
                warnings.warn(f"skipping unreadable corpus file: {exc}")
    else:
        yield from corpus


def prior_histogram_corpus(corpus, kind, patch=15, bins=256, max_side=1024,
                           sog_p=DEFAULT_SOG_P):
    """Average of per-image normalized prior histograms over a corpus.

    corpus is a directory of rasters or an iterable of images. Each image
    is resized to a maximum side of max_side before the prior is computed.
    """
    total = np.zeros(bins)
    count = 0
    for image in _iter_corpus(corpus):
        image = resize_max_side(image, max_side)
        total += map_histogram(prior_map(image, kind, patch, sog_p), bins)
        count += 1
    if count == 0:
        raise ValueError("empty corpus (no readable images)")
    return total / count


def mean_prior_value(corpus, kind, patch=15, max_side=1024,
                     sog_p=DEFAULT_SOG_P):
    """Mean prior-map value over a corpus; used for separation checks."""
    values = []
    for image in _iter_corpus(corpus):
        image = resize_max_side(image, max_side)
        values.append(float(prior_map(image, kind, patch, sog_p).mean()))
    if not values:
        raise ValueError("empty corpus (no readable images)")
    return float(np.mean(values))
