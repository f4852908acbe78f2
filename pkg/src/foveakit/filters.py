"""Normalized 1-D Gaussian filters and the deduplicated filter bank.

A filter for standard deviation sigma keeps taps out to 3*sigma: its length
is ceil(6*sigma) rounded up to the next odd integer so there is always a
center tap.  Fragments whose sigma quantizes to the same length share one
filter, generated from the representative sigma = length / 6; the bank also
keeps the running sum of lengths so a flat coefficient array can be indexed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Largest sigma that still maps to the length-1 identity filter.
IDENTITY_SIGMA = 1.0 / 6.0


def filter_length(sigma) -> np.ndarray | int:
    """Tap count for sigma: ceil(6*sigma) forced up to odd, at least 1."""
    s = np.asarray(sigma, dtype=np.float64)
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError("sigma must be finite and >= 0")
    n = np.maximum(np.ceil(6.0 * s).astype(np.int64), 1)
    n = np.where(n % 2 == 0, n + 1, n)
    return int(n) if n.ndim == 0 else n


def gaussian_filter_1d(sigma: float) -> np.ndarray:
    """Symmetric 1-D Gaussian sampled at integer offsets, normalized to sum 1."""
    length = filter_length(sigma)
    if length <= 1:
        return np.array([1.0])
    radius = (length - 1) // 2
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(k * k) / (2.0 * sigma * sigma))
    return w / w.sum()


@dataclass(frozen=True)
class FilterBank:
    """Deduplicated filters, ordered by strictly increasing length.

    Index 0 is always the identity filter [1.0]; cumulative_sizes[i] is the
    total tap count of filters 0..i, so filter i occupies the half-open
    coefficient range [cumulative_sizes[i-1], cumulative_sizes[i]) of the
    flattened bank.
    """

    filters: tuple[np.ndarray, ...]
    lengths: np.ndarray  # int64, odd, strictly increasing, lengths[0] == 1
    cumulative_sizes: np.ndarray  # int64, running sum of lengths
    sigmas: np.ndarray  # float64, representative sigma per filter

    def __post_init__(self):
        if self.lengths[0] != 1:
            raise ValueError("bank index 0 must be the identity filter")
        if np.any(np.diff(self.lengths) <= 0):
            raise ValueError("bank lengths must be strictly increasing")
        if not np.array_equal(self.cumulative_sizes, np.cumsum(self.lengths)):
            raise ValueError("cumulative sizes inconsistent with lengths")

    def __len__(self) -> int:
        return len(self.filters)

    def to_table(self) -> str:
        """Plain-text dump: index, length, sigma, cumulative size."""
        lines = ["index length sigma cumulative"]
        for i, (length, sig, cum) in enumerate(
            zip(self.lengths, self.sigmas, self.cumulative_sizes)
        ):
            lines.append(f"{i} {length} {sig:.6g} {cum}")
        return "\n".join(lines)


def _bank_from_lengths(lengths: np.ndarray) -> FilterBank:
    sigmas = lengths.astype(np.float64) / 6.0
    filters = tuple(gaussian_filter_1d(s) for s in sigmas)
    return FilterBank(
        filters=filters,
        lengths=lengths,
        cumulative_sizes=np.cumsum(lengths),
        sigmas=sigmas,
    )


def build_bank(field) -> tuple[FilterBank, np.ndarray]:
    """Quantize a SigmaField into a bank plus a per-fragment index grid.

    Fragments are grouped by filter length; each distinct length becomes one
    pooling region.  The identity filter occupies index 0 whether or not any
    fragment maps to it.
    """
    cell_lengths = np.asarray(filter_length(field.sigma), dtype=np.int64)
    distinct = np.unique(cell_lengths)
    if distinct[0] != 1:
        distinct = np.concatenate(([1], distinct))
    bank = _bank_from_lengths(distinct)
    index = np.searchsorted(distinct, cell_lengths).astype(np.int64)
    return bank, index


def total_coefficients(bank: FilterBank) -> int:
    """Total tap count across the bank (the flat coefficient array length)."""
    return int(bank.cumulative_sizes[-1])
