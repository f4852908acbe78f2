"""Timing harness for the renderer and the pyramid baseline.

Times the transform only (image I/O and per-cell setup excluded): for the
block-wise method that is the render pass over a prebuilt plan, mirroring
kernel-only timing; for the pyramid it is mipmap build plus sampling, since
both run per frame.  Absolute numbers are machine-specific and never
asserted anywhere; only orderings and monotone trends are meaningful.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field, replace

from foveakit import blockwise, pyramid
from foveakit.imaging import RasterImage, load_image
from foveakit.retinal import FoveationParams, pixel_sigma_map

CSV_COLUMNS = [
    "method",
    "image_w",
    "image_h",
    "fragment",
    "e_corner",
    "fixation_x",
    "fixation_y",
    "workers",
    "regions",
    "max_filter",
    "ms_mean",
    "ms_std",
]


@dataclass(frozen=True)
class BenchConfig:
    images: tuple  # paths or RasterImages
    fragments: tuple[int, ...] = (32,)
    e_corners: tuple[float, ...] = (20.0,)
    fixations: tuple = ("center",)  # 'center', 'corner', or (x, y)
    methods: tuple[str, ...] = ("blockwise", "pyramid")
    workers: int = 1
    warmup: int = 3
    iterations: int = 10
    pyramid_levels: int = 6
    base_params: FoveationParams = field(default_factory=FoveationParams)

    def __post_init__(self):
        if self.warmup < 3:
            raise ValueError(f"warmup must be >= 3, got {self.warmup}")
        if self.iterations < 10:
            raise ValueError(f"iterations must be >= 10, got {self.iterations}")
        if not (self.images and self.fragments and self.e_corners and self.fixations and self.methods):
            raise ValueError("benchmark sweep is empty")


def _resolve_fixation(spec, size: tuple[int, int]) -> tuple[float, float]:
    w, h = size
    if spec == "center":
        return (w / 2.0, h / 2.0)
    if spec == "corner":
        return (0.0, 0.0)
    x, y = spec
    return (float(x), float(y))


def _time_loop(fn, warmup: int, iterations: int) -> tuple[float, float]:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(iterations):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1000.0)
    return (statistics.fmean(samples), statistics.pstdev(samples))


def _bench_blockwise(img, params, workers, warmup, iterations):
    grid, bank = blockwise.plan(img.size, params)
    mean, std = _time_loop(
        lambda: blockwise.render(img, grid, bank, workers=workers), warmup, iterations
    )
    return mean, std, grid.region_count(), int(bank.lengths[grid.index.max()])


def _bench_pyramid(img, params, levels, warmup, iterations):
    sigma = pixel_sigma_map(img.size, params)

    def run():
        pyr = pyramid.build_pyramid(img, levels)
        pyramid.sample_foveated(pyr, sigma)

    mean, std = _time_loop(run, warmup, iterations)
    levels_built = len(pyramid.build_pyramid(img, levels))
    return mean, std, levels_built, 0


def run_benchmark(config: BenchConfig) -> list[dict]:
    """One row per sweep cell, in deterministic sweep order."""
    images = [
        img if isinstance(img, RasterImage) else load_image(img) for img in config.images
    ]
    rows = []
    for method in config.methods:
        for img in images:
            fragment_axis = config.fragments if method == "blockwise" else (0,)
            for fragment in fragment_axis:
                for e_corner in config.e_corners:
                    for fix_spec in config.fixations:
                        fixation = _resolve_fixation(fix_spec, img.size)
                        params = replace(
                            config.base_params,
                            e_corner=e_corner,
                            fixation=fixation,
                            fragment_size=fragment if fragment else config.base_params.fragment_size,
                        )
                        if method == "blockwise":
                            mean, std, regions, max_filter = _bench_blockwise(
                                img, params, config.workers, config.warmup, config.iterations
                            )
                        elif method == "pyramid":
                            mean, std, regions, max_filter = _bench_pyramid(
                                img, params, config.pyramid_levels, config.warmup, config.iterations
                            )
                        else:
                            raise ValueError(f"unknown method {method!r}")
                        rows.append(
                            {
                                "method": method,
                                "image_w": img.width,
                                "image_h": img.height,
                                "fragment": fragment,
                                "e_corner": e_corner,
                                "fixation_x": fixation[0],
                                "fixation_y": fixation[1],
                                "workers": config.workers,
                                "regions": regions,
                                "max_filter": max_filter,
                                "ms_mean": round(mean, 4),
                                "ms_std": round(std, 4),
                            }
                        )
    return rows


def write_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
