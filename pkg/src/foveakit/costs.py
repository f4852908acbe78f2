"""Analytic cost and memory models for the block-wise scheme.

A fragment of F pixels per side blurred with a G-tap filter works on a
padded tile of side F + G - 1.  The horizontal pass runs over the fragment
columns across the full tile height, the vertical pass over the fragment
itself, each position costing G multiply-accumulates, so

    ops/output pixel = G * (F * (F + G - 1) + F * F) / F^2 = G * (2 + (G - 1) / F)

Per-block scratch memory holds the 1-byte tile plus the 4-byte real-valued
intermediate (F columns x tile height); the filter store holds 4-byte
coefficients for every filter plus a 4-byte cumulative-size entry each.
These budgets bound how large a filter fits a given scratch size: 48 KB of
per-block memory caps filters near 133/174/196 taps at F = 32/16/8.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SHARED_BUDGET = 48 * 1024
CONSTANT_BUDGET = 64 * 1024


def _check_fg(fragment: int, filter_taps: int) -> None:
    if fragment < 1:
        raise ValueError(f"fragment must be >= 1, got {fragment}")
    if filter_taps < 1 or filter_taps % 2 == 0:
        raise ValueError(f"filter taps must be odd and >= 1, got {filter_taps}")


def ops_per_output_pixel(fragment: int, filter_taps: int) -> float:
    """Multiply-accumulates per output pixel per channel."""
    _check_fg(fragment, filter_taps)
    return filter_taps * (2.0 + (filter_taps - 1.0) / fragment)


def shared_memory_bytes(fragment: int, filter_taps: int) -> int:
    """Per-block scratch: uint8 tile plus float32 intermediate."""
    _check_fg(fragment, filter_taps)
    tile = fragment + filter_taps - 1
    return tile * tile + 4 * fragment * tile


def constant_memory_bytes(total_coeffs: int, num_filters: int) -> int:
    """Filter store: float32 coefficients plus int32 cumulative sizes."""
    if total_coeffs < 0 or num_filters < 0:
        raise ValueError("counts must be non-negative")
    return 4 * (total_coeffs + num_filters)


def max_filter_size(fragment: int, shared_budget: int = DEFAULT_SHARED_BUDGET) -> int:
    """Largest odd filter length whose scratch fits the budget (0 if none)."""
    if fragment < 1:
        raise ValueError(f"fragment must be >= 1, got {fragment}")
    best = 0
    taps = 1
    while shared_memory_bytes(fragment, taps) <= shared_budget:
        best = taps
        taps += 2
    return best


@dataclass(frozen=True)
class CostReport:
    fragment_size: int
    filter_length: int
    ops_per_pixel: float
    shared_bytes: int
    constant_bytes: int
    fits_in_budget: bool

    @classmethod
    def evaluate(
        cls,
        fragment: int,
        filter_taps: int,
        total_coeffs: int = 0,
        num_filters: int = 0,
        shared_budget: int = DEFAULT_SHARED_BUDGET,
    ) -> "CostReport":
        shared = shared_memory_bytes(fragment, filter_taps)
        return cls(
            fragment_size=fragment,
            filter_length=filter_taps,
            ops_per_pixel=ops_per_output_pixel(fragment, filter_taps),
            shared_bytes=shared,
            constant_bytes=constant_memory_bytes(total_coeffs, num_filters),
            fits_in_budget=shared <= shared_budget,
        )


def cost_sweep_rows(fragments, filter_lengths, shared_budget: int = DEFAULT_SHARED_BUDGET):
    """CSV-ready sweep over a (fragment, filter) grid."""
    rows = []
    for f in fragments:
        for g in filter_lengths:
            r = CostReport.evaluate(f, g, shared_budget=shared_budget)
            rows.append(
                {
                    "fragment": f,
                    "filter": g,
                    "ops_per_pixel": f"{r.ops_per_pixel:.6g}",
                    "shared_bytes": r.shared_bytes,
                    "fits_in_budget": int(r.fits_in_budget),
                }
            )
    return rows
