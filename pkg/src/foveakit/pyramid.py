"""Gaussian-pyramid (mipmap) foveation baseline.

Each level is the previous one blurred and decimated 2x per dimension, so a
pixel's blur strength selects a fractional level: bilinear samples from the
two bracketing levels are mixed linearly (trilinear interpolation).  The
work per output pixel is identical for every blur strength, which is what
makes this baseline fast but blocky compared to the convolutional renderer.

Baseline constants (the technique is quoted without them): pre-decimation
blur sigma 1.0, level mapping sigma_0 = 0.5 so level(sigma) =
log2(sigma / 0.5), decimation keeps the top-left pixel of each 2x2 block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from foveakit.convolve import quantize_u8, sep_blur_u8
from foveakit.filters import gaussian_filter_1d
from foveakit.imaging import RasterImage
from foveakit.retinal import (
    FoveationParams,
    pixel_sigma_from_density,
    pixel_sigma_map,
)

PRE_BLUR_SIGMA = 1.0
LEVEL_SIGMA_0 = 0.5


@dataclass(frozen=True)
class Pyramid:
    """Level 0 is the original; level k has dimensions ceil(w/2^k) x ceil(h/2^k)."""

    levels: tuple[RasterImage, ...]

    def __len__(self) -> int:
        return len(self.levels)


def build_pyramid(img: RasterImage, max_levels: int) -> Pyramid:
    """Blur-then-decimate chain, stopping at max_levels or a 1x1 level."""
    if max_levels < 1:
        raise ValueError(f"max_levels must be >= 1, got {max_levels}")
    g = gaussian_filter_1d(PRE_BLUR_SIGMA)
    levels = [img]
    while len(levels) < max_levels:
        prev = levels[-1]
        if prev.width == 1 and prev.height == 1:
            break
        blurred = sep_blur_u8(prev.data, g)
        levels.append(RasterImage.from_array(blurred[::2, ::2]))
    return Pyramid(levels=tuple(levels))


def _bilinear_image(level: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Clamped bilinear sample of a (H,W,C) float32 array at (u,v) per pixel."""
    h, w = level.shape[:2]
    u = np.clip(u, 0.0, w - 1.0).astype(np.float32)
    v = np.clip(v, 0.0, h - 1.0).astype(np.float32)
    u0 = u.astype(np.int64)
    v0 = v.astype(np.int64)
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    fu = (u - u0)[..., None]
    fv = (v - v0)[..., None]
    top = level[v0, u0] * (1 - fu) + level[v0, u1] * fu
    bot = level[v1, u0] * (1 - fu) + level[v1, u1] * fu
    return top * (1 - fv) + bot * fv


@njit(cache=True)
def _bilinear_flat(flat, base, lw, lh, channels, x, y, scale, ch):
    # pragma: no cover - compiled
    u = min(max(x * scale, 0.0), lw - 1.0)
    v = min(max(y * scale, 0.0), lh - 1.0)
    u0 = int(u)
    v0 = int(v)
    u1 = min(u0 + 1, lw - 1)
    v1 = min(v0 + 1, lh - 1)
    fu = np.float32(u - u0)
    fv = np.float32(v - v0)
    top = flat[base + (v0 * lw + u0) * channels + ch] * (1 - fu) + flat[
        base + (v0 * lw + u1) * channels + ch
    ] * fu
    bot = flat[base + (v1 * lw + u0) * channels + ch] * (1 - fu) + flat[
        base + (v1 * lw + u1) * channels + ch
    ] * fu
    return top * (1 - fv) + bot * fv


@njit(parallel=True, cache=True)
def _trilinear_sample(flat, offsets, widths, heights, channels, lo, frac, out):
    # pragma: no cover - compiled
    h, w = lo.shape
    n = len(offsets)
    for y in prange(h):
        for x in range(w):
            k0 = lo[y, x]
            k1 = min(k0 + 1, n - 1)
            t = frac[y, x]
            s0 = np.float32(1.0) / (1 << k0)
            s1 = np.float32(1.0) / (1 << k1)
            for ch in range(channels):
                a = _bilinear_flat(flat, offsets[k0], widths[k0], heights[k0], channels, x, y, s0, ch)
                b = _bilinear_flat(flat, offsets[k1], widths[k1], heights[k1], channels, x, y, s1, ch)
                out[y, x, ch] = (1 - t) * a + t * b


def sample_foveated(pyr: Pyramid, sigma: np.ndarray) -> RasterImage:
    """Per-pixel trilinear mipmap sampling driven by a per-pixel sigma field.

    Every pixel performs exactly two bilinear level samples and one mix
    whatever its sigma, so the cost is independent of the field's values.
    """
    if not np.all(np.isfinite(sigma)) or np.any(sigma < 0):
        raise ValueError("sigma field must be finite and >= 0")
    base = pyr.levels[0]
    h, w = base.height, base.width
    if sigma.shape != (h, w):
        raise ValueError(f"sigma shape {sigma.shape} does not match image {w}x{h}")
    n = len(pyr)
    level = np.log2(np.maximum(sigma, LEVEL_SIGMA_0) / LEVEL_SIGMA_0)
    level = np.clip(level, 0.0, n - 1.0)
    lo = np.floor(level).astype(np.int64)
    frac = (level - lo).astype(np.float32)

    flat = np.concatenate([lvl.data.astype(np.float32).ravel() for lvl in pyr.levels])
    sizes = np.array([lvl.width * lvl.height * lvl.channels for lvl in pyr.levels])
    offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64)
    widths = np.array([lvl.width for lvl in pyr.levels], dtype=np.int64)
    heights = np.array([lvl.height for lvl in pyr.levels], dtype=np.int64)
    out = np.empty((h, w, base.channels), dtype=np.float32)
    _trilinear_sample(flat, offsets, widths, heights, base.channels, lo, frac, out)
    return RasterImage.from_array(quantize_u8(out))


def foveate_pyramid(
    img: RasterImage,
    params: FoveationParams,
    density: RasterImage | None = None,
    sigma_max: float | None = None,
    max_levels: int = 6,
) -> RasterImage:
    """Convenience baseline run: per-pixel sigma map -> pyramid -> sampling."""
    if density is not None:
        if sigma_max is None:
            raise ValueError("sigma_max is required with a density map")
        sigma = pixel_sigma_from_density(density, sigma_max, img.size)
    else:
        sigma = pixel_sigma_map(img.size, params)
    return sample_foveated(build_pyramid(img, max_levels), sigma)
