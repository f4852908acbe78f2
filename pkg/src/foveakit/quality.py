"""SSIM maps for validating the block-wise renderer against the oracle.

Standard single-scale SSIM: 11x11 Gaussian window with sigma 1.5, K1 = 0.01,
K2 = 0.03, dynamic range 255.  Color inputs are converted to luma (BT.601
weights) first.  The map is dense (stride 1) over fully-valid windows, so it
is (h-10) x (w-10) for an h x w input; map cell (i, j) describes the window
centered at image pixel (i+5, j+5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from foveakit.convolve import quantize_u8
from foveakit.imaging import RasterImage

WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1 = 0.01
K2 = 0.03
DYNAMIC_RANGE = 255.0

_BT601 = np.array([0.299, 0.587, 0.114])


def _luma(img: RasterImage) -> np.ndarray:
    data = img.data.astype(np.float64)
    if img.channels == 1:
        return data[:, :, 0]
    return data @ _BT601


def _window() -> np.ndarray:
    r = WINDOW_SIZE // 2
    k = np.arange(-r, r + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA))
    return w / w.sum()


def _filter_valid(arr: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Separable windowed mean over fully-valid windows only."""
    horiz = sliding_window_view(arr, len(g), axis=1) @ g
    return sliding_window_view(horiz, len(g), axis=0) @ g


@dataclass(frozen=True)
class SSIMMap:
    """Dense per-window SSIM plus its summary statistics."""

    values: np.ndarray  # float64, (h - 10, w - 10), in [-1, 1]
    mean: float
    min: float
    argmin: tuple[int, int]  # image coordinates (y, x) of the worst window center

    def to_image(self) -> RasterImage:
        """8-bit rendering of the map: round(255 * clamp(ssim, 0, 1))."""
        return RasterImage.from_array(quantize_u8(np.clip(self.values, 0.0, 1.0) * 255.0))

    def stats_text(self) -> str:
        return (
            f"mean {self.mean:.6f}\n"
            f"min {self.min:.6f}\n"
            f"argmin {self.argmin[1]} {self.argmin[0]}\n"
        )


def _map_from_values(values: np.ndarray) -> SSIMMap:
    offset = WINDOW_SIZE // 2
    flat_idx = int(np.argmin(values))
    my, mx = np.unravel_index(flat_idx, values.shape)
    return SSIMMap(
        values=values,
        mean=float(values.mean()),
        min=float(values.min()),
        argmin=(int(my) + offset, int(mx) + offset),
    )


def ssim_map(reference: RasterImage, test: RasterImage) -> SSIMMap:
    if reference.size != test.size or reference.channels != test.channels:
        raise ValueError(
            f"dimension mismatch: {reference.size}x{reference.channels} vs "
            f"{test.size}x{test.channels}"
        )
    if reference.width < WINDOW_SIZE or reference.height < WINDOW_SIZE:
        raise ValueError(f"images must be at least {WINDOW_SIZE}px per side")
    x = _luma(reference)
    y = _luma(test)
    g = _window()
    mu_x = _filter_valid(x, g)
    mu_y = _filter_valid(y, g)
    var_x = _filter_valid(x * x, g) - mu_x * mu_x
    var_y = _filter_valid(y * y, g) - mu_y * mu_y
    cov = _filter_valid(x * y, g) - mu_x * mu_y
    c1 = (K1 * DYNAMIC_RANGE) ** 2
    c2 = (K2 * DYNAMIC_RANGE) ** 2
    values = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    )
    return _map_from_values(values)


def mean_ssim_map(pairs) -> SSIMMap:
    """Pixel-wise arithmetic mean of the SSIM maps of (reference, test) pairs."""
    maps = [ssim_map(ref, test) for ref, test in pairs]
    if not maps:
        raise ValueError("mean_ssim_map needs at least one pair")
    shape = maps[0].values.shape
    if any(m.values.shape != shape for m in maps):
        raise ValueError("all pairs must share the same dimensions")
    return _map_from_values(np.mean([m.values for m in maps], axis=0))


def radial_profile(
    values: np.ndarray, center: tuple[float, float], bins: int
) -> np.ndarray:
    """Mean of a 2-D map over concentric distance rings around center.

    center is in the map's own coordinates (x, y); rings split the largest
    center-to-corner distance evenly.  Empty rings yield NaN.
    """
    h, w = values.shape
    cx, cy = center
    yy, xx = np.mgrid[0:h, 0:w]
    d = np.hypot(xx - cx, yy - cy)
    edges = np.linspace(0.0, d.max() + 1e-9, bins + 1)
    which = np.digitize(d.ravel(), edges) - 1
    sums = np.bincount(which, weights=values.ravel(), minlength=bins)[:bins]
    counts = np.bincount(which, minlength=bins)[:bins]
    with np.errstate(invalid="ignore"):
        return sums / counts
