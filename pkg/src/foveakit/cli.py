"""Command-line entry point.

Subcommands: foveate (block-wise render), oracle (exact per-pixel render),
pyramid (baseline), grid (blur-grid and filter-bank dump), ssim (quality map
and stats), cost (analytic sweep), bench (timing sweep), serve (streaming
service).  Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from foveakit import bench as bench_mod
from foveakit import blockwise, costs, pyramid, quality, reference
from foveakit.imaging import load_image, save_image
from foveakit.retinal import FoveationParams, load_params


def _add_model_flags(p: argparse.ArgumentParser, fragment_default=None) -> None:
    p.add_argument("--config", help="key=value parameter file, overridden by flags")
    p.add_argument("--fragment", type=int, default=fragment_default, help="fragment size in pixels")
    p.add_argument("--fixation", help="fixation point 'x,y' (default: image center)")
    p.add_argument("--e-corner", type=float, dest="e_corner", help="eccentricity at the image corner, degrees")
    p.add_argument("--strength", type=float, help="blur strength multiplier")
    p.add_argument("--map", dest="density", help="1-channel retinal-density map (excludes the retinal model)")
    p.add_argument("--sigma-max", type=float, dest="sigma_max", help="sigma for density value 0 (requires --map)")


def _build_params(args) -> FoveationParams:
    params = FoveationParams()
    if getattr(args, "config", None):
        params = load_params(args.config, params)
    updates = {}
    if getattr(args, "fragment", None):
        updates["fragment_size"] = args.fragment
    if getattr(args, "fixation", None):
        x, _, y = args.fixation.partition(",")
        updates["fixation"] = (float(x), float(y))
    if getattr(args, "e_corner", None) is not None:
        updates["e_corner"] = args.e_corner
    if getattr(args, "strength", None) is not None:
        updates["strength"] = args.strength
    return replace(params, **updates)


def _load_density(args):
    if not getattr(args, "density", None):
        return None, None
    density = load_image(args.density)
    sigma_max = args.sigma_max if args.sigma_max is not None else 8.0
    return density, sigma_max


def _cmd_foveate(args) -> int:
    img = load_image(args.input)
    params = _build_params(args)
    density, sigma_max = _load_density(args)
    out, grid, _, stats = blockwise.foveate(
        img, params, density, sigma_max, workers=args.workers, use_shift=not args.no_shift
    )
    save_image(out, args.output)
    print(f"regions {stats.regions}")
    print(f"render_ms {stats.render_ms:.3f}")
    return 0


def _cmd_oracle(args) -> int:
    img = load_image(args.input)
    params = _build_params(args)
    density, sigma_max = _load_density(args)
    out = reference.foveate_exact(img, params, density, sigma_max)
    save_image(out, args.output)
    return 0


def _cmd_pyramid(args) -> int:
    img = load_image(args.input)
    params = _build_params(args)
    density, sigma_max = _load_density(args)
    out = pyramid.foveate_pyramid(img, params, density, sigma_max, max_levels=args.levels)
    save_image(out, args.output)
    return 0


def _cmd_grid(args) -> int:
    img = load_image(args.input)
    params = _build_params(args)
    density, sigma_max = _load_density(args)
    grid, bank = blockwise.plan(img.size, params, density, sigma_max, use_shift=not args.no_shift)
    text = grid.to_text(bank)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_ssim(args) -> int:
    ref = load_image(args.ref)
    test = load_image(args.test)
    result = quality.ssim_map(ref, test)
    if args.map_out:
        save_image(result.to_image(), args.map_out)
    print(result.stats_text(), end="")
    return 0


def _cmd_cost(args) -> int:
    fragments = [int(v) for v in args.fragments.split(",")]
    filters = [int(v) for v in args.filters.split(",")]
    rows = costs.cost_sweep_rows(fragments, filters, shared_budget=args.budget)
    lines = ["fragment,filter,ops_per_pixel,shared_bytes,fits_in_budget"]
    lines += [
        f"{r['fragment']},{r['filter']},{r['ops_per_pixel']},{r['shared_bytes']},{r['fits_in_budget']}"
        for r in rows
    ]
    text = "\n".join(lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for f in fragments:
        print(f"max_filter F={f}: {costs.max_filter_size(f, args.budget)}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    config = bench_mod.BenchConfig(
        images=tuple(args.images),
        fragments=tuple(int(v) for v in args.fragments.split(",")),
        e_corners=tuple(float(v) for v in args.e_corners.split(",")),
        fixations=tuple(args.fixations.split(",")),
        methods=tuple(args.methods.split(",")),
        workers=args.workers,
        warmup=args.warmup,
        iterations=args.iterations,
    )
    rows = bench_mod.run_benchmark(config)
    bench_mod.write_csv(rows, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


def _cmd_serve(args) -> int:
    from foveakit import service

    img = load_image(args.image)
    params = _build_params(args)
    service.serve(img, params, port=args.port, assets_dir=args.assets, workers=args.workers)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foveakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("foveate", help="block-wise foveated render")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_model_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-shift", action="store_true", help="disable fragment shift (fixed tiling)")
    p.set_defaults(fn=_cmd_foveate)

    p = sub.add_parser("oracle", help="exact per-pixel foveated render")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_model_flags(p)
    p.set_defaults(fn=_cmd_oracle)

    p = sub.add_parser("pyramid", help="Gaussian-pyramid baseline render")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_model_flags(p)
    p.add_argument("--levels", type=int, default=6)
    p.set_defaults(fn=_cmd_pyramid)

    p = sub.add_parser("grid", help="dump the blur grid and filter bank")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    _add_model_flags(p)
    p.add_argument("--no-shift", action="store_true")
    p.set_defaults(fn=_cmd_grid)

    p = sub.add_parser("ssim", help="SSIM map and stats between two images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--map-out", dest="map_out", help="write the SSIM map as 8-bit PNG")
    p.set_defaults(fn=_cmd_ssim)

    p = sub.add_parser("cost", help="analytic cost-model sweep (CSV)")
    p.add_argument("--fragments", default="8,16,32")
    p.add_argument("--filters", default="1,3,33,99")
    p.add_argument("--budget", type=int, default=costs.DEFAULT_SHARED_BUDGET)
    p.add_argument("--output")
    p.set_defaults(fn=_cmd_cost)

    p = sub.add_parser("bench", help="timing sweep (CSV)")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--fragments", default="32")
    p.add_argument("--e-corners", dest="e_corners", default="20")
    p.add_argument("--fixations", default="center")
    p.add_argument("--methods", default="blockwise,pyramid")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--iterations", type=int, default=10)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("serve", help="gaze-contingent streaming service")
    p.add_argument("--image", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--assets", help="viewer asset directory (default: bundled fallback page)")
    _add_model_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
