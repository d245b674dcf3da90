"""Forward degradation model: synthetic scenes with known ground truth.

The simulator evaluates I = A*M*t + A*(1 - t) exactly, with the
transmission derived from an optical-depth field t = exp(-tau).
"""

import numpy as np


def transmission_from_tau(tau):
    """t = exp(-tau) for a nonnegative scalar or field."""
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau < 0):
        raise ValueError("optical depth must be nonnegative")
    return np.exp(-tau)


def degrade(reflectivity, ambient, tau=None, transmission=None):
    """Degrade a reflectivity image: I = A*M*t + A*(1 - t).

    Exactly one of tau / transmission is given; either may be a scalar or
    an (H, W) field matching the image. The result is a convex combination
    of A*M and A, hence always in [0, 1].
    """
    if (tau is None) == (transmission is None):
        raise ValueError("give exactly one of tau or transmission")
    refl = np.asarray(reflectivity, dtype=np.float64)
    amb = np.asarray(ambient, dtype=np.float64).reshape(1, 1, 3)
    t = transmission_from_tau(tau) if tau is not None \
        else np.asarray(transmission, dtype=np.float64)
    if t.ndim == 2:
        if t.shape != refl.shape[:2]:
            raise ValueError("depth field and image dimensions disagree")
        t = t[:, :, None]
    return amb * refl * t + amb * (1.0 - t)


def depth_ramp(width, height, tau_min, tau_max, axis="x"):
    """Linear optical-depth ramp along the given axis ('x' or 'y')."""
    if not 0 <= tau_min <= tau_max:
        raise ValueError("need 0 <= tau_min <= tau_max")
    if axis == "x":
        row = np.linspace(tau_min, tau_max, width)
        return np.tile(row, (height, 1))
    if axis == "y":
        col = np.linspace(tau_min, tau_max, height)
        return np.tile(col[:, None], (1, width))
    raise ValueError("axis must be 'x' or 'y'")


def turbid_ladder(reflectivity, ambient, tau_list):
    """Sequence of increasingly degraded frames with uniform optical depth.

    tau_list must be strictly increasing and start at 0, so frame 0 is the
    clean reference scene under the same illuminant (I = A*M).
    """
    taus = [float(v) for v in tau_list]
    if not taus or taus[0] != 0.0:
        raise ValueError("tau ladder must start at 0")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau ladder must be strictly increasing")
    return [degrade(reflectivity, ambient, tau=tau) for tau in taus]


def textured_scene(width, height, seed=0, bright_fraction=0.65):
    """Deterministic synthetic reflectivity scene for demos and benchmarks.

    A mix of full-white pixels and uniform random color noise: every local
    window spans nearly the full intensity range, which makes the scene a
    good target for contrast-based transmission estimation.
    """
    rng = np.random.default_rng(seed)
    scene = rng.uniform(0.0, 1.0, size=(height, width, 3))
    bright = rng.uniform(size=(height, width)) < bright_fraction
    scene[bright] = 1.0
    return scene
