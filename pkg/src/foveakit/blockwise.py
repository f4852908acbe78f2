"""Block-wise foveated rendering.

The image is tiled into square fragments; the tiling is shifted so one
fragment is centered on the fixation point, which keeps the untouched foveal
region as small as possible and makes the blur pattern track gaze smoothly.
Each fragment is blurred independently with the single separable Gaussian
assigned by the blur grid: the fragment plus its filter padding is extracted
as a tile (clamp-to-edge at image borders), a horizontal pass produces a
real-valued intermediate, a vertical pass produces the fragment, and the
result is quantized to 8 bits once.  The fixation fragment and any fragment
with the identity filter are copied through untouched.

Fragments are the unit of parallelism: the input raster is shared read-only
and every fragment writes a disjoint output region, so the rendered image is
bit-identical for any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from foveakit.convolve import quantize_u8
from foveakit.filters import FilterBank, build_bank
from foveakit.imaging import RasterImage
from foveakit.retinal import (
    FoveationParams,
    SigmaField,
    build_sigma_field,
    ingest_density_map,
)
from foveakit.tiling import cell_of, fragment_spans


def compute_fragment_shift(fixation: tuple[float, float], fragment_size: int) -> tuple[int, int]:
    """Tiling origin offset that centers one fragment on the fixation point.

    Moving the fixation by one pixel moves the offset by one pixel (mod F),
    so the blur pattern translates smoothly instead of snapping at fragment
    boundaries.
    """
    if fragment_size < 4:
        raise ValueError(f"fragment_size must be >= 4, got {fragment_size}")
    fx, fy = fixation
    dx = int(np.floor(fx)) - fragment_size // 2
    dy = int(np.floor(fy)) - fragment_size // 2
    return (dx % fragment_size, dy % fragment_size)


@dataclass(frozen=True)
class BlurGrid:
    """Spatial plan for one rendered frame: which filter blurs which fragment."""

    index: np.ndarray  # int64, (grid_h, grid_w), indices into a FilterBank
    shift: tuple[int, int]  # tiling origin offset, in [0, fragment_size)^2
    fragment_size: int
    foveal_cell: tuple[int, int]  # (gy, gx) of the fragment containing the fixation

    @property
    def grid_size(self) -> tuple[int, int]:
        return (self.index.shape[1], self.index.shape[0])

    def region_count(self) -> int:
        """Pooling regions: distinct filters actually used by the grid."""
        return len(np.unique(self.index))

    def to_text(self, bank: FilterBank) -> str:
        """Structured-text dump consumed by the CLI and the viewer overlay."""
        lines = [
            f"fragment {self.fragment_size}",
            f"shift {self.shift[0]} {self.shift[1]}",
            f"grid {self.index.shape[1]} {self.index.shape[0]}",
            f"foveal_cell {self.foveal_cell[1]} {self.foveal_cell[0]}",
            f"regions {self.region_count()}",
            "",
            bank.to_table(),
            "",
            "index_matrix",
        ]
        lines += [" ".join(str(v) for v in row) for row in self.index]
        return "\n".join(lines)


@dataclass(frozen=True)
class Tile:
    """A fragment plus the padding its filter needs for convolution."""

    x0: int  # fragment origin, pixels
    y0: int
    fragment_w: int  # fragment extent, clipped at image borders
    fragment_h: int
    radius: int  # filter padding, (length - 1) / 2

    @property
    def tile_w(self) -> int:
        return self.fragment_w + 2 * self.radius

    @property
    def tile_h(self) -> int:
        return self.fragment_h + 2 * self.radius


def build_blur_grid(
    field: SigmaField,
    bank: FilterBank,
    index: np.ndarray,
    fixation: tuple[float, float],
    image_size: tuple[int, int],
    fragment_size: int,
    shift: tuple[int, int],
) -> BlurGrid:
    """Attach the quantized filter indices to the shifted tiling.

    The fragment containing the fixation point is forced to the identity
    filter regardless of its sigma.
    """
    w, h = image_size
    sx = fragment_spans(w, fragment_size, shift[0])
    sy = fragment_spans(h, fragment_size, shift[1])
    if index.shape != (len(sy), len(sx)):
        raise ValueError(
            f"index grid {index.shape} does not cover the {len(sy)}x{len(sx)} tiling"
        )
    foveal = (cell_of(sy, fixation[1]), cell_of(sx, fixation[0]))
    grid = index.copy()
    grid[foveal] = 0
    return BlurGrid(
        index=grid, shift=shift, fragment_size=fragment_size, foveal_cell=foveal
    )


def _render_cell(
    img: np.ndarray, out: np.ndarray, span_x, span_y, g: np.ndarray
) -> None:
    x0, x1 = span_x
    y0, y1 = span_y
    if len(g) == 1:
        out[y0:y1, x0:x1] = img[y0:y1, x0:x1]
        return
    h, w = img.shape[:2]
    radius = (len(g) - 1) // 2
    rows = np.clip(np.arange(y0 - radius, y1 + radius), 0, h - 1)
    cols = np.clip(np.arange(x0 - radius, x1 + radius), 0, w - 1)
    tile = img[np.ix_(rows, cols)].astype(np.float64)
    # horizontal pass over the padded tile, then vertical over the
    # real-valued intermediate; quantization happens once at the end
    interm = sliding_window_view(tile, len(g), axis=1) @ g
    frag = sliding_window_view(interm, len(g), axis=0) @ g
    out[y0:y1, x0:x1] = quantize_u8(frag)


def render(
    img: RasterImage, grid: BlurGrid, bank: FilterBank, workers: int = 1
) -> RasterImage:
    """Blur every fragment with its assigned filter; dimensions are preserved."""
    if img.channels not in (1, 3):
        raise ValueError(f"render supports 1 or 3 channels, got {img.channels}")
    if int(grid.index.max()) >= len(bank):
        raise ValueError(
            f"grid references filter {int(grid.index.max())} but bank has {len(bank)}"
        )
    sx = fragment_spans(img.width, grid.fragment_size, grid.shift[0])
    sy = fragment_spans(img.height, grid.fragment_size, grid.shift[1])
    if grid.index.shape != (len(sy), len(sx)):
        raise ValueError(f"grid {grid.index.shape} does not match image {img.size}")

    src = img.data
    out = np.empty_like(src)

    def run_rows(row_range):
        for gy in row_range:
            for gx in range(len(sx)):
                _render_cell(src, out, sx[gx], sy[gy], bank.filters[grid.index[gy, gx]])

    if workers <= 1:
        run_rows(range(len(sy)))
    else:
        bands = [range(start, len(sy), workers) for start in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for future in [pool.submit(run_rows, band) for band in bands]:
                future.result()
    return RasterImage.from_array(out)


@dataclass(frozen=True)
class RenderStats:
    render_ms: float
    regions: int
    max_filter: int
    fragment_size: int
    shift: tuple[int, int]


def plan(
    img_size: tuple[int, int],
    params: FoveationParams,
    density: RasterImage | None = None,
    sigma_max: float | None = None,
    use_shift: bool = True,
) -> tuple[BlurGrid, FilterBank]:
    """Everything up to the per-frame render: shift, sigma field, bank, grid."""
    fixation = params.fixation_for(img_size)
    shift = compute_fragment_shift(fixation, params.fragment_size) if use_shift else (0, 0)
    if density is not None:
        if sigma_max is None:
            raise ValueError("sigma_max is required with a density map")
        field = ingest_density_map(
            density, sigma_max, img_size, params.fragment_size, shift
        )
    else:
        field = build_sigma_field(img_size, params, shift)
    bank, index = build_bank(field)
    grid = build_blur_grid(
        field, bank, index, fixation, img_size, params.fragment_size, shift
    )
    return grid, bank


def foveate(
    img: RasterImage,
    params: FoveationParams,
    density: RasterImage | None = None,
    sigma_max: float | None = None,
    workers: int = 1,
    use_shift: bool = True,
) -> tuple[RasterImage, BlurGrid, FilterBank, RenderStats]:
    """Full pipeline: shift -> sigma field -> bank -> grid -> render."""
    grid, bank = plan(img.size, params, density, sigma_max, use_shift)
    t0 = time.perf_counter()
    result = render(img, grid, bank, workers=workers)
    ms = (time.perf_counter() - t0) * 1000.0
    stats = RenderStats(
        render_ms=ms,
        regions=grid.region_count(),
        max_filter=int(bank.lengths[grid.index.max()]),
        fragment_size=grid.fragment_size,
        shift=grid.shift,
    )
    return result, grid, bank, stats
