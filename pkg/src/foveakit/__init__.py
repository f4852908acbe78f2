"""Block-wise foveated image rendering toolkit.

Renders images with spatially-varying Gaussian blur that follows either a
human contrast-sensitivity retinal model or an arbitrary retinal-density map.
The core transform tiles the image into square fragments, blurs each with a
single separable Gaussian chosen for its midpoint eccentricity, and shifts the
tiling so one fragment is centered on the fixation point.  A per-pixel
reference foveator, a Gaussian-pyramid baseline, SSIM quality maps, analytic
cost models, a benchmark harness and a gaze-contingent streaming service
round out the toolkit.
"""

from foveakit.imaging import RasterImage, load_image, save_image
from foveakit.retinal import (
    FoveationParams,
    SigmaField,
    build_sigma_field,
    contrast_threshold,
    cutoff_cpd,
    cutoff_cpp,
    eccentricity_of,
    ingest_density_map,
    sigma_at,
)
from foveakit.filters import FilterBank, build_bank, gaussian_filter_1d, total_coefficients
from foveakit.blockwise import BlurGrid, RenderStats, compute_fragment_shift, foveate, render
from foveakit.reference import blur_uniform, foveate_exact
from foveakit.pyramid import Pyramid, build_pyramid, foveate_pyramid, sample_foveated
from foveakit.quality import SSIMMap, mean_ssim_map, ssim_map

__all__ = [
    "RasterImage",
    "load_image",
    "save_image",
    "FoveationParams",
    "SigmaField",
    "build_sigma_field",
    "contrast_threshold",
    "cutoff_cpd",
    "cutoff_cpp",
    "eccentricity_of",
    "ingest_density_map",
    "sigma_at",
    "FilterBank",
    "build_bank",
    "gaussian_filter_1d",
    "total_coefficients",
    "BlurGrid",
    "RenderStats",
    "compute_fragment_shift",
    "foveate",
    "render",
    "blur_uniform",
    "foveate_exact",
    "Pyramid",
    "build_pyramid",
    "foveate_pyramid",
    "sample_foveated",
    "SSIMMap",
    "ssim_map",
    "mean_ssim_map",
]
