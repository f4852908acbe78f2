"""Shifted fragment tiling shared by the sigma field and the renderer.

A tiling with fragment size F and origin offset (dx, dy) in [0, F)^2 puts
fragment boundaries at dx + k*F along x (likewise y).  When the offset is
nonzero a partial fragment [0, dx) appears at the leading edge, and the
trailing fragment is clipped at the image border, so the whole image is
always covered by disjoint cells.
"""

from __future__ import annotations

import numpy as np


def fragment_spans(extent: int, fragment: int, offset: int) -> np.ndarray:
    """(n, 2) array of [start, end) pixel spans covering [0, extent)."""
    if extent < 1:
        raise ValueError(f"extent must be positive, got {extent}")
    if not 0 <= offset < fragment:
        raise ValueError(f"offset {offset} outside [0, {fragment})")
    starts = list(range(offset, extent, fragment))
    if offset > 0:
        starts.insert(0, 0)
    spans = np.empty((len(starts), 2), dtype=np.int64)
    spans[:, 0] = starts
    spans[:-1, 1] = starts[1:]
    spans[-1, 1] = extent
    return spans


def span_midpoints(spans: np.ndarray) -> np.ndarray:
    """Geometric midpoint of each [start, end) span in continuous coordinates."""
    return (spans[:, 0] + spans[:, 1]) / 2.0


def cell_of(spans: np.ndarray, coord: float) -> int:
    """Index of the span containing coord (clamped to the tiling)."""
    idx = int(np.searchsorted(spans[:, 0], coord, side="right")) - 1
    return min(max(idx, 0), len(spans) - 1)
