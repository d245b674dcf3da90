"""Ambient (veiling) light estimation from a single degraded image."""

import numpy as np

# Floor keeping every ambient channel away from zero; guards the divisions
# in the transmission formula and the model inversion.
AMBIENT_FLOOR = 0.01

DEFAULT_SOG_P = 6.0


def _clamp(a):
    return np.clip(np.asarray(a, dtype=np.float64), AMBIENT_FLOOR, 1.0)


def shades_of_gray(image, p=DEFAULT_SOG_P):
    """Minkowski p-mean illuminant estimate, per channel.

    p = 1 is gray-world; p -> inf approaches max-rgb. The raw p-mean is used
    as the ambient magnitude (no renormalization). Result clamped to
    [AMBIENT_FLOOR, 1].
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    image = np.asarray(image, dtype=np.float64)
    if image.size == 0:
        raise ValueError("empty image")
    flat = image.reshape(-1, image.shape[-1])
    est = np.power(np.mean(np.power(flat, p), axis=0), 1.0 / p)
    return _clamp(est)


def brightest_pixel(image, quantile=0.001):
    """Baseline estimator: mean of the top-quantile pixels by luminance.

    Luminance is the plain channel mean. Result clamped to [AMBIENT_FLOOR, 1].
    """
    if not 0.0 < quantile <= 1.0:
        raise ValueError("quantile must be in (0, 1]")
    image = np.asarray(image, dtype=np.float64)
    if image.size == 0:
        raise ValueError("empty image")
    flat = image.reshape(-1, image.shape[-1])
    lum = flat.mean(axis=1)
    k = max(1, int(np.ceil(quantile * flat.shape[0])))
    top = np.argsort(lum, kind="stable")[-k:]
    return _clamp(flat[top].mean(axis=0))


def parse_ambient_spec(text):
    """Parse a CLI ambient spec: 'auto', 'bright:<q>' or '<r>,<g>,<b>'.

    Returns one of ('sog', None), ('bright', q) or ('literal', rgb array).
    """
    text = text.strip()
    if text == "auto":
        return ("sog", None)
    if text.startswith("bright:"):
        q = float(text.split(":", 1)[1])
        if not 0.0 < q <= 1.0:
            raise ValueError("brightest-pixel quantile must be in (0, 1]")
        return ("bright", q)
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"ambient literal must be r,g,b: {text!r}")
    if any(v < 0.0 or v > 1.0 for v in parts):
        raise ValueError("ambient literals must lie in [0, 1]")
    return ("literal", _clamp(parts))


def resolve_ambient(image, spec, sog_p=DEFAULT_SOG_P):
    """Turn a parsed ambient spec into a concrete 3-vector for an image."""
    kind, arg = spec
    if kind == "sog":
        return shades_of_gray(image, sog_p)
    if kind == "bright":
        return brightest_pixel(image, arg)
    if kind == "literal":
        return _clamp(arg)
    raise ValueError(f"unknown ambient spec: {kind!r}")
