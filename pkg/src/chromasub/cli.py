"""Command-line front end.

Subcommands:

* ``run``: encode, reconstruct, and score images, writing a report.
* ``verify-convexity``: audit the curvature constants of every pattern.
* ``audit-solver``: compare the descent against exhaustive search.
* ``trace-block``: dump one block's distortion surface and descent path.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines
using the long option names; values given as flags override the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ChromaSubError
from .geometry import BlockIndex
from .netpbm import read_ppm
from .pipeline import (
    PipelineConfig,
    PROPOSED,
    audit_solver,
    render_convexity,
    render_report_csv,
    render_report_json,
    render_trace_grid_csv,
    render_trace_path,
    run_pipeline,
    trace_block,
    verify_convexity,
)


def _comma_tuple(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _block_index(text: str) -> BlockIndex:
    try:
        bx, by = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected BX,BY integers, got {text!r}") from None
    return BlockIndex(bx, by)


# config-file key -> (argparse dest, converter); shared across subcommands
_CONFIG_KEYS = {
    "kind": ("kind", str),
    "variant": ("variant", str),
    "method": ("methods", _comma_tuple),
    "upsampler": ("upsamplers", _comma_tuple),
    "future-method": ("future_method", str),
    "format": ("report_format", str),
    "out": ("out", str),
    "jobs": ("jobs", int),
    "seed": ("seed", int),
    "blocks": ("blocks", int),
    "block": ("block", _block_index),
}


def load_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    if not getattr(args, "config", None):
        return
    file_values = load_config_file(args.config)
    given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
    for key, raw in file_values.items():
        if key not in _CONFIG_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        dest, convert = _CONFIG_KEYS[key]
        if not hasattr(args, dest):
            raise ValueError(f"config key {key!r} does not apply to this subcommand")
        if f"--{key}" in given:
            continue
        setattr(args, dest, convert(raw))


def _add_common(sub: argparse.ArgumentParser, with_pipeline: bool) -> None:
    sub.add_argument("--config", help="key = value file with defaults for the flags")
    if with_pipeline:
        sub.add_argument("--kind", default="rgb", choices=("rgb", "bayer", "dtdi"))
        sub.add_argument("--variant", default=None, help="pattern variant (default a for CFA kinds)")
        sub.add_argument(
            "--future-method",
            dest="future_method",
            default="A",
            help="pre-pass rule that seeds not-yet-final neighbor values",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromasub",
        description="Chroma subsampling with a per-block convex distortion solver.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="encode, reconstruct, and score images")
    run.add_argument("images", nargs="+", help="input P6 PPM files")
    _add_common(run, with_pipeline=True)
    run.add_argument(
        "--method",
        dest="methods",
        type=_comma_tuple,
        default=(PROPOSED, "A"),
        help="comma-separated subsampling methods",
    )
    run.add_argument(
        "--upsampler",
        dest="upsamplers",
        type=_comma_tuple,
        default=("BILI",),
        help="comma-separated reconstruction filters",
    )
    run.add_argument("--out", default=None, help="report path (default stdout)")
    run.add_argument("--format", dest="report_format", default="csv", choices=("csv", "json"))
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes over images")
    run.add_argument("--seed", type=int, default=0)

    convexity = commands.add_parser("verify-convexity", help="audit curvature constants")
    convexity.add_argument("--config", help=argparse.SUPPRESS)
    convexity.add_argument("--out", default=None, help="write the table here instead of stdout")

    audit = commands.add_parser("audit-solver", help="compare descent against exhaustive search")
    audit.add_argument("images", nargs="+", help="input P6 PPM files")
    _add_common(audit, with_pipeline=True)
    audit.add_argument("--blocks", type=int, default=1000, help="number of blocks to audit")
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--out", default=None, help="write a JSON summary here")

    trace = commands.add_parser("trace-block", help="dump one block's surface and path")
    trace.add_argument("image", help="input P6 PPM file")
    _add_common(trace, with_pipeline=True)
    trace.add_argument("--block", type=_block_index, required=True, help="block index BX,BY")
    trace.add_argument("--out", default="trace", help="output prefix for .grid.csv and .path.txt")

    return parser


def _load_images(paths) -> list[tuple[str, object]]:
    return [(Path(p).stem, read_ppm(p)) for p in paths]


def _pipeline_config(args, methods=None, upsamplers=None) -> PipelineConfig:
    return PipelineConfig(
        kind=args.kind,
        variant=args.variant,
        methods=methods if methods is not None else (PROPOSED,),
        upsamplers=upsamplers if upsamplers is not None else ("BILI",),
        future_method=args.future_method,
        report_format=getattr(args, "report_format", "csv"),
        jobs=getattr(args, "jobs", 1),
        seed=getattr(args, "seed", 0),
    )


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_run(args) -> int:
    cfg = _pipeline_config(args, methods=tuple(args.methods), upsamplers=tuple(args.upsamplers))
    report = run_pipeline(cfg, _load_images(args.images))
    render = render_report_json if cfg.report_format == "json" else render_report_csv
    _emit(render(report), args.out)
    return 1 if report.errors else 0


def _cmd_verify_convexity(args) -> int:
    rows = verify_convexity()
    _emit(render_convexity(rows), args.out)
    return 0 if all(r.passed is not False for r in rows) else 1


def _cmd_audit_solver(args) -> int:
    cfg = _pipeline_config(args)
    audit = audit_solver(cfg, _load_images(args.images), sample_blocks=args.blocks)
    summary = {
        "blocks": audit.blocks,
        "hits": audit.hits,
        "hit_rate": audit.hit_rate,
        "max_gap": audit.max_gap,
        "monotone": audit.monotone,
        "never_worse_than_start": audit.never_worse_than_start,
        "mean_iterations": audit.mean_iterations,
        "max_iterations": audit.max_iterations,
    }
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=2) + "\n")
    sys.stdout.write(
        f"audited {audit.blocks} blocks: hit_rate={audit.hit_rate:.4f} "
        f"max_gap={audit.max_gap:.3g} mean_iterations={audit.mean_iterations:.3f}\n"
    )
    return 0


def _cmd_trace_block(args) -> int:
    cfg = _pipeline_config(args)
    name, rgb = _load_images([args.image])[0]
    trace = trace_block(cfg, rgb, args.block)
    grid_path = Path(args.out + ".grid.csv")
    path_path = Path(args.out + ".path.txt")
    grid_path.write_text(render_trace_grid_csv(trace))
    path_path.write_text(render_trace_path(trace))
    u, v, d = trace.result.u_s, trace.result.v_s, trace.result.distortion
    sys.stdout.write(
        f"block ({trace.index.bx},{trace.index.by}) of {name}: "
        f"minimum ({u},{v}) distortion {d:.6g} after {trace.result.iterations} steps; "
        f"wrote {grid_path} and {path_path}\n"
    )
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "verify-convexity": _cmd_verify_convexity,
    "audit-solver": _cmd_audit_solver,
    "trace-block": _cmd_trace_block,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, argv)
        return _HANDLERS[args.command](args)
    except (ChromaSubError, ValueError, OSError) as exc:
        sys.stderr.write(f"chromasub: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
