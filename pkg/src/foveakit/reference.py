"""Per-pixel foveation oracle and whole-image uniform blur.

`foveate_exact` is the lossless reference: every output pixel is the 2-D
Gaussian-weighted average of its neighborhood, with sigma evaluated at that
pixel's own eccentricity.  No fragment quantization, no foveal passthrough
beyond the identity threshold.  It exists to validate the block-wise
renderer, so clarity wins over speed; the inner loops are compiled with
numba only to keep test suites tolerable.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

from foveakit.convolve import sep_blur_u8
from foveakit.filters import filter_length, gaussian_filter_1d
from foveakit.imaging import RasterImage
from foveakit.retinal import (
    FoveationParams,
    pixel_sigma_from_density,
    pixel_sigma_map,
)


@njit(parallel=True, cache=True)
def _foveate_pixels(img, sigma, radius, max_radius, out):  # pragma: no cover - compiled
    h, w, c = img.shape
    for y in prange(h):
        weights = np.empty(2 * max_radius + 1, dtype=np.float64)
        for x in range(w):
            r = radius[y, x]
            if r <= 0:
                for ch in range(c):
                    out[y, x, ch] = img[y, x, ch]
                continue
            inv = 1.0 / (2.0 * sigma[y, x] * sigma[y, x])
            for k in range(-r, r + 1):
                weights[k + r] = math.exp(-k * k * inv)
            wsum = 0.0
            for ch in range(c):
                out[y, x, ch] = 0.0
            for dy in range(-r, r + 1):
                gy = weights[dy + r]
                yy = min(max(y + dy, 0), h - 1)
                for dx in range(-r, r + 1):
                    gxy = gy * weights[dx + r]
                    xx = min(max(x + dx, 0), w - 1)
                    wsum += gxy
                    for ch in range(c):
                        out[y, x, ch] += gxy * img[yy, xx, ch]
            for ch in range(c):
                v = math.floor(out[y, x, ch] / wsum + 0.5)
                out[y, x, ch] = min(max(v, 0.0), 255.0)


def _foveate_with_sigma(img: RasterImage, sigma: np.ndarray) -> RasterImage:
    lengths = np.asarray(filter_length(sigma), dtype=np.int64)
    radius = (lengths - 1) // 2
    out = np.empty(img.data.shape, dtype=np.float64)
    _foveate_pixels(img.data.astype(np.float64), sigma, radius, int(radius.max()), out)
    return RasterImage.from_array(out.astype(np.uint8))


def foveate_exact(
    img: RasterImage,
    params: FoveationParams,
    density: RasterImage | None = None,
    sigma_max: float | None = None,
) -> RasterImage:
    """Foveate on a single-pixel basis (continuous sigma, no fragments)."""
    if density is not None:
        if sigma_max is None:
            raise ValueError("sigma_max is required with a density map")
        sigma = pixel_sigma_from_density(density, sigma_max, img.size)
    else:
        sigma = pixel_sigma_map(img.size, params)
    return _foveate_with_sigma(img, sigma)


def blur_uniform(img: RasterImage, sigma: float) -> RasterImage:
    """Whole-image separable Gaussian blur with the bank's filter for sigma."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    return RasterImage.from_array(sep_blur_u8(img.data, gaussian_filter_1d(sigma)))
