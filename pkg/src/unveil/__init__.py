"""Single-image restoration for scenes degraded by scattering media.

Estimates the medium transmission from two complementary local cues
(distance to the veiling light and local contrast), refines the maps
against image edges, and inverts the physical degradation model to
recover scene reflectivity. Ships a forward simulator and an MSE /
histogram evaluation harness alongside the restoration pipeline.
"""

__version__ = "0.1.0"

from .image_io import load_image, save_image, resize_max_side, patch_reduce
from .ambient import shades_of_gray, brightest_pixel
from .priors import (
    dark_channel,
    udcp,
    veil_difference_transmission,
    contrast_transmission,
)
from .restore import (
    PipelineConfig,
    RestorationParams,
    fuse_max,
    contribution_map,
    recover_reflectivity,
    restore_pipeline,
)
from .simulate import degrade, depth_ramp, turbid_ladder, transmission_from_tau
from .evaluate import mse, mse_curve, prior_histogram_corpus
