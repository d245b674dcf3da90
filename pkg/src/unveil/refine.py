"""Edge-aware refinement of rough transmission maps.

The reference path solves the matting-Laplacian linear system
(L + lam*I) t = lam*t_rough with diagonally preconditioned conjugate
gradients; a color guided filter is available as a fast alternative.
"""

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage
import scipy.sparse
import scipy.sparse.linalg

from .image_io import resize_to


@dataclass
class MattingConfig:
    window_side: int = 3
    epsilon: float = 1e-6
    fidelity: float = 1e-4
    solver_tol: float = 1e-5
    max_iters: int = 2000
    downsample: int | None = 800  # max side for the solve; None = full res

    def validate(self):
        if self.window_side < 3 or self.window_side % 2 == 0:
            raise ValueError("window_side must be odd and >= 3")
        if self.epsilon <= 0 or self.fidelity <= 0:
            raise ValueError("epsilon and fidelity must be positive")
        if not 0.0 < self.solver_tol < 1.0:
            raise ValueError("solver_tol must lie in (0, 1)")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def build_matting_laplacian(guide, cfg=None):
    """Matting Laplacian of a color guide image as a CSR sparse matrix.

    For each w x w window with mean mu and (biased) covariance S:
    L(i,j) = sum over windows containing i,j of
    [delta_ij - (1/n)(1 + (I_i-mu)^T (S + (eps/n) Id)^-1 (I_j-mu))].
    Symmetric PSD; rows sum to zero.
    """
    cfg = cfg or MattingConfig()
    cfg.validate()
    guide = np.asarray(guide, dtype=np.float64)
    h, w = guide.shape[:2]
    side = cfg.window_side
    if h < side or w < side:
        raise ValueError("guide smaller than the matting window")
    n = side * side
    npx = h * w

    idx = np.arange(npx).reshape(h, w)
    win_idx = sliding_window_view(idx, (side, side)).reshape(-1, n)
    win_i = guide.reshape(npx, 3)[win_idx]                      # (k, n, 3)
    mu = win_i.mean(axis=1, keepdims=True)
    centered = win_i - mu
    cov = np.einsum("kni,knj->kij", centered, centered) / n
    inv = np.linalg.inv(cov + (cfg.epsilon / n) * np.eye(3))
    cross = np.einsum("kni,kij,kmj->knm", centered, inv, centered)
    vals = np.eye(n)[None, :, :] - (1.0 + cross) / n

    rows = np.broadcast_to(win_idx[:, :, None], cross.shape)
    cols = np.broadcast_to(win_idx[:, None, :], cross.shape)
    lap = scipy.sparse.coo_matrix(
        (vals.ravel(), (rows.ravel(), cols.ravel())), shape=(npx, npx))
    return lap.tocsr()


def solve_refinement(lap, rough, cfg=None):
    """Solve (L + lam*I) t = lam*rough by diagonally preconditioned CG.

    Returns (refined map clamped to [0,1], stats dict). Non-convergence
    keeps the best iterate and sets stats['converged'] = False.
    """
    cfg = cfg or MattingConfig()
    cfg.validate()
    rough = np.asarray(rough, dtype=np.float64)
    npx = rough.size
    if lap.shape[0] != npx:
        raise ValueError("system and rough map dimensions disagree")
    system = (lap + cfg.fidelity * scipy.sparse.identity(npx)).tocsr()
    b = cfg.fidelity * rough.ravel()
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return np.zeros_like(rough), {
            "iterations": 0, "residual": 0.0, "converged": True,
            "overshoot_low": 0.0, "overshoot_high": 0.0}

    precond = scipy.sparse.diags(1.0 / system.diagonal())
    iters = [0]

    def count(_):
        iters[0] += 1

    x, info = scipy.sparse.linalg.cg(
        system, b, rtol=cfg.solver_tol, maxiter=cfg.max_iters,
        M=precond, callback=count)
    residual = float(np.linalg.norm(b - system @ x) / b_norm)
    stats = {
        "iterations": iters[0],
        "residual": residual,
        "converged": info == 0,
        "overshoot_low": float(x.min()),
        "overshoot_high": float(x.max()),
    }
    return np.clip(x.reshape(rough.shape), 0.0, 1.0), stats


def matting_refine(guide, rough, cfg=None):
    """Full matting path: optional downsample, build L, CG solve, upsample."""
    cfg = cfg or MattingConfig()
    cfg.validate()
    guide = np.asarray(guide, dtype=np.float64)
    rough = np.asarray(rough, dtype=np.float64)
    h, w = rough.shape
    if cfg.downsample is not None and max(h, w) > cfg.downsample:
        scale = cfg.downsample / max(h, w)
        sw = max(cfg.window_side, int(round(w * scale)))
        sh = max(cfg.window_side, int(round(h * scale)))
        small_guide = resize_to(guide, sw, sh)
        small_rough = resize_to(rough, sw, sh)
        lap = build_matting_laplacian(small_guide, cfg)
        refined, stats = solve_refinement(lap, small_rough, cfg)
        refined = np.clip(resize_to(refined, w, h), 0.0, 1.0)
        stats["solved_at"] = [sh, sw]
        return refined, stats
    lap = build_matting_laplacian(guide, cfg)
    refined, stats = solve_refinement(lap, rough, cfg)
    stats["solved_at"] = [h, w]
    return refined, stats


def _box_mean(arr, radius):
    size = 2 * radius + 1
    if arr.ndim == 2:
        return ndimage.uniform_filter(arr, size=size, mode="nearest")
    return ndimage.uniform_filter(arr, size=(size, size, 1), mode="nearest")


def guided_filter_refine(guide, rough, radius=30, eps=1e-3):
    """Color guided filter of a rough map with the degraded image as guide."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    guide = np.asarray(guide, dtype=np.float64)
    rough = np.asarray(rough, dtype=np.float64)

    mean_i = _box_mean(guide, radius)                       # (h, w, 3)
    mean_p = _box_mean(rough, radius)                       # (h, w)
    mean_ip = _box_mean(guide * rough[:, :, None], radius)
    cov_ip = mean_ip - mean_i * mean_p[:, :, None]

    outer = guide[:, :, :, None] * guide[:, :, None, :]
    mean_outer = np.stack(
        [_box_mean(outer[:, :, :, c], radius) for c in range(3)], axis=3)
    sigma = mean_outer - mean_i[:, :, :, None] * mean_i[:, :, None, :]
    sigma = sigma + eps * np.eye(3)

    a = np.linalg.solve(sigma, cov_ip[..., None])[..., 0]   # (h, w, 3)
    b = mean_p - np.einsum("hwc,hwc->hw", a, mean_i)
    out = np.einsum("hwc,hwc->hw", _box_mean(a, radius), guide) \
        + _box_mean(b, radius)
    return np.clip(out, 0.0, 1.0)
