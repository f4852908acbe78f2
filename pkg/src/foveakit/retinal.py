"""Retinal contrast-sensitivity model and blur-strength fields.

The model maps a pixel position to a retinal eccentricity (degrees), the
eccentricity to the highest resolvable spatial frequency, and that frequency
to the standard deviation of a Gaussian blur filter:

    CT(f, e)  = ct0 * exp(alpha * f * (e + e2) / e2)      contrast threshold
    f_deg(e)  = e2 / (alpha * (e + e2)) * ln(1 / ct0)     cutoff, cycles/degree
    f_pix(f)  = 0.5 * f_deg / f_max                       cutoff, cycles/pixel
    sigma(e)  = strength / (2 * pi * f_pix)               blur, pixels

Eccentricity is linear in pixel distance from the fixation point: the image
corner (half-diagonal away from the center) is assigned e_corner degrees.
Arbitrary retinal-density maps can replace the model: bright map regions are
dense (sharp), dark regions sparse (blurred).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from foveakit.imaging import RasterImage
from foveakit.tiling import fragment_spans, span_midpoints

#: Calibrated so the 1920x1080 / fragment-32 / center-fixation configuration
#: produces 26 pooling regions.
DEFAULT_E_CORNER = 60.0


@dataclass(frozen=True)
class FoveationParams:
    """Retinal-model constants and rendering knobs."""

    alpha: float = 0.106  # spatial-frequency decay constant
    e2: float = 2.3  # half-resolution eccentricity, degrees
    ct0: float = 1.0 / 64.0  # minimum contrast threshold
    e_corner: float = DEFAULT_E_CORNER  # eccentricity at the image corner, degrees
    f_max: float | None = None  # max resolvable cpd; None = foveal cutoff
    strength: float = 1.0  # sigma multiplier
    fragment_size: int = 32  # pixels per fragment side
    fixation: tuple[float, float] | None = None  # pixels; None = image center

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.e2 > 0:
            raise ValueError(f"e2 must be > 0, got {self.e2}")
        if not 0 < self.ct0 < 1:
            raise ValueError(f"ct0 must be in (0, 1), got {self.ct0}")
        if self.e_corner < 0:
            raise ValueError(f"e_corner must be >= 0, got {self.e_corner}")
        if self.f_max is not None and not self.f_max > 0:
            raise ValueError(f"f_max must be > 0, got {self.f_max}")
        if self.strength < 0:
            raise ValueError(f"strength must be >= 0, got {self.strength}")
        if self.fragment_size < 4:
            raise ValueError(f"fragment_size must be >= 4, got {self.fragment_size}")

    def max_cpd(self) -> float:
        """Effective f_max: explicit value or the foveal cutoff frequency."""
        return self.f_max if self.f_max is not None else cutoff_cpd(0.0, self)

    def fixation_for(self, image_size: tuple[int, int]) -> tuple[float, float]:
        """Resolve the fixation point for an image, defaulting to its center."""
        w, h = image_size
        if self.fixation is None:
            return (w / 2.0, h / 2.0)
        fx, fy = self.fixation
        if not (0 <= fx < w and 0 <= fy < h):
            raise ValueError(f"fixation {self.fixation} outside {w}x{h} image")
        return (float(fx), float(fy))


@dataclass(frozen=True)
class SigmaField:
    """Per-fragment blur strength, sampled at fragment midpoints.

    The grid covers the shifted tiling of the image; sigma[gy, gx] belongs to
    the fragment in grid row gy, column gx.
    """

    grid_width: int
    grid_height: int
    sigma: np.ndarray  # float64, shape (grid_height, grid_width), all >= 0

    def __post_init__(self):
        if self.sigma.shape != (self.grid_height, self.grid_width):
            raise ValueError(f"sigma shape {self.sigma.shape} does not match grid")
        if not np.all(np.isfinite(self.sigma)) or np.any(self.sigma < 0):
            raise ValueError("sigma values must be finite and >= 0")


def eccentricity_of(point, image_size, fixation, e_corner: float):
    """Degrees of eccentricity for a pixel position.

    Linear in Euclidean distance from the fixation point; the image
    half-diagonal maps to e_corner regardless of where the fixation sits, so
    the sigma-vs-distance profile does not rescale as gaze moves.
    Accepts scalars or arrays for the point.
    """
    w, h = image_size
    if w < 1 or h < 1:
        raise ValueError(f"image dimensions must be positive, got {w}x{h}")
    px, py = point
    fx, fy = fixation
    d_p = np.hypot(np.asarray(px, dtype=np.float64) - fx, np.asarray(py, dtype=np.float64) - fy)
    d_corner = math.hypot(w / 2.0, h / 2.0)
    out = d_p / d_corner * e_corner
    return float(out) if np.isscalar(px) or np.ndim(out) == 0 else out


def contrast_threshold(f, e, params: FoveationParams):
    """Minimum detectable contrast for frequency f (cpd) at eccentricity e.

    Values above 1 mean the grating is undetectable at any contrast.
    """
    f = np.asarray(f, dtype=np.float64)
    out = params.ct0 * np.exp(params.alpha * f * (np.asarray(e) + params.e2) / params.e2)
    return float(out) if out.ndim == 0 else out


def cutoff_cpd(e, params: FoveationParams):
    """Highest resolvable spatial frequency (cycles/degree) at eccentricity e."""
    e = np.asarray(e, dtype=np.float64)
    out = params.e2 / (params.alpha * (e + params.e2)) * math.log(1.0 / params.ct0)
    return float(out) if out.ndim == 0 else out


def cutoff_cpp(f_deg, params: FoveationParams):
    """Convert a cutoff from cycles/degree to cycles/pixel.

    0.5 cycles/pixel (one cycle per two pixels) is the highest frequency an
    image can represent; f_max maps to it.
    """
    f_deg = np.asarray(f_deg, dtype=np.float64)
    out = 0.5 * f_deg / params.max_cpd()
    return float(out) if out.ndim == 0 else out


def sigma_at(e, params: FoveationParams):
    """Gaussian blur standard deviation (pixels) at eccentricity e.

    The cutoff frequency in cycles/pixel is treated as the standard
    deviation of the filter in the frequency domain; strength scales the
    spatial sigma for stronger blurring.
    """
    e_arr = np.asarray(e, dtype=np.float64)
    if not np.all(np.isfinite(e_arr)):
        raise ValueError("eccentricity must be finite")
    f_pix = cutoff_cpp(cutoff_cpd(e_arr, params), params)
    out = params.strength / (2.0 * math.pi * np.asarray(f_pix, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def build_sigma_field(
    image_size: tuple[int, int], params: FoveationParams, shift: tuple[int, int]
) -> SigmaField:
    """One sigma per fragment of the shifted tiling, sampled at midpoints.

    Edge fragments clipped by the image border use their true (clipped)
    geometric midpoint.
    """
    w, h = image_size
    fx, fy = params.fixation_for(image_size)
    sx = fragment_spans(w, params.fragment_size, shift[0])
    sy = fragment_spans(h, params.fragment_size, shift[1])
    mx = span_midpoints(sx)
    my = span_midpoints(sy)
    ecc = eccentricity_of(
        (mx[None, :], my[:, None]), image_size, (fx, fy), params.e_corner
    )
    sig = sigma_at(ecc, params)
    return SigmaField(grid_width=len(sx), grid_height=len(sy), sigma=np.atleast_2d(sig))


def _bilinear(map_f: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sample a 2-D float map at continuous (u, v) positions, clamped."""
    mh, mw = map_f.shape
    u = np.clip(u, 0.0, mw - 1.0)
    v = np.clip(v, 0.0, mh - 1.0)
    u0 = np.floor(u).astype(np.int64)
    v0 = np.floor(v).astype(np.int64)
    u1 = np.minimum(u0 + 1, mw - 1)
    v1 = np.minimum(v0 + 1, mh - 1)
    fu = u - u0
    fv = v - v0
    top = map_f[v0, u0] * (1 - fu) + map_f[v0, u1] * fu
    bot = map_f[v1, u0] * (1 - fu) + map_f[v1, u1] * fu
    return top * (1 - fv) + bot * fv


def _density_to_sigma(samples: np.ndarray, sigma_max: float) -> np.ndarray:
    # bright = dense = sharp: value 255 keeps the image, 0 blurs at sigma_max
    return sigma_max * (1.0 - samples / 255.0)


def _map_coords(x: np.ndarray, extent: int, map_extent: int) -> np.ndarray:
    # align pixel centers of the map lattice with the image lattice
    return (np.asarray(x, dtype=np.float64) + 0.5) * (map_extent / extent) - 0.5


def ingest_density_map(
    density: RasterImage,
    sigma_max: float,
    image_size: tuple[int, int],
    fragment_size: int,
    shift: tuple[int, int],
) -> SigmaField:
    """Sigma field from an arbitrary retinal-density map.

    The 1-channel map is bilinearly resampled to the fragment-midpoint
    lattice of the shifted tiling; sample value v in [0, 255] maps to
    sigma = sigma_max * (1 - v / 255).
    """
    if density.channels != 1:
        raise ValueError(f"density map must be 1-channel, got {density.channels}")
    if sigma_max < 0:
        raise ValueError(f"sigma_max must be >= 0, got {sigma_max}")
    w, h = image_size
    sx = fragment_spans(w, fragment_size, shift[0])
    sy = fragment_spans(h, fragment_size, shift[1])
    u = _map_coords(span_midpoints(sx), w, density.width)
    v = _map_coords(span_midpoints(sy), h, density.height)
    map_f = density.data[:, :, 0].astype(np.float64)
    uu, vv = np.meshgrid(u, v)
    sig = _density_to_sigma(_bilinear(map_f, uu, vv), sigma_max)
    return SigmaField(grid_width=len(sx), grid_height=len(sy), sigma=sig)


def pixel_sigma_map(image_size: tuple[int, int], params: FoveationParams) -> np.ndarray:
    """Continuous per-pixel sigma from the retinal model, shape (h, w)."""
    w, h = image_size
    fx, fy = params.fixation_for(image_size)
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    ecc = eccentricity_of((xs[None, :], ys[:, None]), image_size, (fx, fy), params.e_corner)
    return np.asarray(sigma_at(ecc, params), dtype=np.float64)


def pixel_sigma_from_density(
    density: RasterImage, sigma_max: float, image_size: tuple[int, int]
) -> np.ndarray:
    """Continuous per-pixel sigma from a density map, shape (h, w)."""
    if density.channels != 1:
        raise ValueError(f"density map must be 1-channel, got {density.channels}")
    if sigma_max < 0:
        raise ValueError(f"sigma_max must be >= 0, got {sigma_max}")
    w, h = image_size
    u = _map_coords(np.arange(w), w, density.width)
    v = _map_coords(np.arange(h), h, density.height)
    map_f = density.data[:, :, 0].astype(np.float64)
    uu, vv = np.meshgrid(u, v)
    return _density_to_sigma(_bilinear(map_f, uu, vv), sigma_max)


_PARAM_FIELDS = {
    "alpha": float,
    "e2": float,
    "ct0": float,
    "e_corner": float,
    "f_max": float,
    "strength": float,
    "fragment_size": int,
}


def parse_params_text(text: str, base: FoveationParams | None = None) -> FoveationParams:
    """Parse a plain-text key=value config into FoveationParams.

    Unknown keys are rejected; '#' starts a comment; fixation is 'x,y'.
    """
    params = base if base is not None else FoveationParams()
    updates = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "fixation":
            x, _, y = value.partition(",")
            updates["fixation"] = (float(x), float(y))
        elif key in _PARAM_FIELDS:
            updates[key] = _PARAM_FIELDS[key](value)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return replace(params, **updates)


def load_params(path, base: FoveationParams | None = None) -> FoveationParams:
    return parse_params_text(Path(path).read_text(), base)
