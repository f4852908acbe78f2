"""Whole-image separable convolution helpers and the shared rounding rule."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Round half away from zero and clip to the 8-bit range.

    Fixed project-wide so renders are reproducible bit for bit; inputs are
    non-negative (weighted averages of uint8 samples).
    """
    return np.clip(np.floor(values + 0.5), 0.0, 255.0).astype(np.uint8)


def sep_convolve_float(arr: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Two-pass separable convolution with clamp-to-edge borders.

    arr is (h, w, c) float64; returns the same shape.  Horizontal pass first,
    then vertical over the real-valued intermediate.
    """
    radius = (len(g) - 1) // 2
    if radius == 0:
        return arr * g[0]
    padded = np.pad(arr, ((0, 0), (radius, radius), (0, 0)), mode="edge")
    horiz = sliding_window_view(padded, len(g), axis=1) @ g
    padded = np.pad(horiz, ((radius, radius), (0, 0), (0, 0)), mode="edge")
    return sliding_window_view(padded, len(g), axis=0) @ g


def sep_blur_u8(data: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Separable blur of a (h, w, c) uint8 raster, quantized once at the end."""
    if len(g) == 1:
        return data.copy()
    return quantize_u8(sep_convolve_float(data.astype(np.float64), g))
