"""Rough (un-refined) transmission maps from local image statistics.

Two novel cues drive the pipeline: distance of patch colors to the
ambient light (veil difference) and per-patch channel contrast. The
classic dark channel and its green/blue underwater variant are provided
as baselines and for corpus statistics.
"""

import numpy as np

from .image_io import patch_reduce

DEFAULT_PATCH = 15


def dark_channel(image, side=DEFAULT_PATCH):
    """Min over the three channels and a side x side window, per pixel."""
    return patch_reduce(image, side, "min")


def udcp(image, side=DEFAULT_PATCH):
    """Dark channel restricted to the green and blue channels."""
    image = np.asarray(image, dtype=np.float64)
    return patch_reduce(image[:, :, 1:], side, "min")


def veil_difference_denominator(ambient):
    """max over channels of max(1 - A, A); the prior's haze-free bound."""
    ambient = np.clip(np.asarray(ambient, dtype=np.float64), 0.0, 1.0)
    return float(np.max(np.maximum(1.0 - ambient, ambient)))


def veil_difference_transmission(image, ambient, side=DEFAULT_PATCH):
    """Rough transmission from the largest patch deviation from the ambient.

    Numerator: single max over channels and window of |I - A|.
    Denominator: max over channels of max(1 - A, A). With pure-white
    ambient this reduces exactly to 1 - dark_channel.
    """
    image = np.asarray(image, dtype=np.float64)
    ambient = np.clip(np.asarray(ambient, dtype=np.float64), 0.0, 1.0)
    diff = np.abs(image - ambient[None, None, :]).max(axis=2)
    num = patch_reduce(diff, side, "max")
    return np.clip(num / veil_difference_denominator(ambient), 0.0, 1.0)


def contrast_transmission(image, side=DEFAULT_PATCH):
    """Rough transmission from the best per-channel intensity range in a patch.

    Per-channel windowed range first, then the max across channels.
    """
    hi = patch_reduce(image, side, "max", per_channel=True)
    lo = patch_reduce(image, side, "min", per_channel=True)
    return np.clip((hi - lo).max(axis=2), 0.0, 1.0)


def composite_rough(image, ambient, side=DEFAULT_PATCH):
    """Pointwise max of the two rough cues; used for corpus statistics."""
    return np.maximum(veil_difference_transmission(image, ambient, side),
                      contrast_transmission(image, side))
