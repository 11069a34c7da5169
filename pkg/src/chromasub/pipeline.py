"""End-to-end runs: subsample, reconstruct, score, and report.

A run takes named RGB images, simulates the chosen sensor kind, encodes
chroma with one or more methods, reconstructs through one or more
upsamplers, and scores each (image, method, upsampler) cell. Reports are
deterministic: identical inputs and configuration give identical bytes
except for the wall-clock timing column.

Images are processed independently and may run in parallel worker
processes; blocks inside one image are always solved sequentially because
each block depends on its finalized neighbors.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .colorspace import clamp_quantize, clamp_quantize_rgb, rgb_image_to_yuv, yuv_image_to_rgb
from .errors import ChromaSubError, GeometryError, PatternError
from .geometry import BlockIndex, RgbImage, SubsampledChromaImage, YuvImage, block_grid_shape
from .metrics import cpsnr, mean_finite_db, psnr_gray, ssim_cfa, ssim_rgb
from .model import closed_form, evaluate_grid, hessian, hessian_det
from .mosaic import demosaic_bilinear, mosaic, reconstruct_cfa
from .patterns import PatternKind, pattern_for, supported_patterns
from .solver import SolverConfig, SolverResult, brute_force, subsample_image
from .subsample import BaselineMethod, chen_u3v2, color_domination, subsample_baseline
from .upsample import UpsampleMethod, upsample

SCHEMA = "chromasub-report-1"

PROPOSED = "proposed"

_BASELINES = tuple(m.value for m in BaselineMethod)

METHODS_BY_KIND = {
    PatternKind.RGB: (PROPOSED,) + _BASELINES,
    PatternKind.BAYER: (PROPOSED,) + _BASELINES + ("CHEN_U3V2",),
    PatternKind.DTDI: (PROPOSED,) + _BASELINES + ("CD",),
}

_METRIC_BY_KIND = {
    PatternKind.RGB: "cpsnr",
    PatternKind.BAYER: "psnr",
    PatternKind.DTDI: "cpsnr",
}


@dataclass(frozen=True)
class PipelineConfig:
    """Validated settings for one run."""

    kind: str = "rgb"
    variant: Optional[str] = None
    methods: tuple[str, ...] = (PROPOSED, "A")
    upsamplers: tuple[str, ...] = ("BILI",)
    future_method: str = "A"
    report_format: str = "csv"
    jobs: int = 1
    seed: int = 0

    def __post_init__(self):
        pattern = pattern_for(self.kind, self.variant)  # validates kind and variant
        allowed = METHODS_BY_KIND[pattern.kind]
        for m in self.methods:
            if m not in allowed:
                raise PatternError(
                    f"method {m!r} is not defined for kind {pattern.kind.value}; "
                    f"choose from {allowed}"
                )
        if not self.methods:
            raise ValueError("need at least one method")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError(f"duplicate methods in {self.methods}")
        for u in self.upsamplers:
            UpsampleMethod(u)
        if not self.upsamplers:
            raise ValueError("need at least one upsampler")
        if len(set(self.upsamplers)) != len(self.upsamplers):
            raise ValueError(f"duplicate upsamplers in {self.upsamplers}")
        BaselineMethod(self.future_method)
        if self.report_format not in ("csv", "json"):
            raise ValueError(f"unknown report format {self.report_format!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    @property
    def pattern(self):
        return pattern_for(self.kind, self.variant)


@dataclass(frozen=True)
class ReportRow:
    image: str
    kind: str
    variant: str
    method: str
    upsampler: str
    metric: str
    quality_db: float
    ssim: float
    mean_iterations: Optional[float]
    subsample_seconds: float


@dataclass(frozen=True)
class AggregateRow:
    method: str
    upsampler: str
    metric: str
    mean_quality_db: Optional[float]
    mean_ssim: float
    images: int
    excluded: int


@dataclass(frozen=True)
class RunReport:
    schema: str
    kind: str
    variant: str
    future_method: str
    seed: int
    rows: tuple[ReportRow, ...]
    aggregates: tuple[AggregateRow, ...]
    errors: tuple[tuple[str, str], ...]


def _encode(yuv: YuvImage, pattern, method: str, cfg: PipelineConfig):
    """Subsample with one method; returns (quantized chroma, mean iterations)."""
    if method == PROPOSED:
        iteration_counts = []

        def note(index, model, result):
            iteration_counts.append(result.iterations)
            return False

        sub = subsample_image(
            yuv,
            pattern,
            future_method=BaselineMethod(cfg.future_method),
            on_block=note,
        )
        mean_iters = sum(iteration_counts) / len(iteration_counts)
        return sub, mean_iters
    if method == "CHEN_U3V2":
        u_s, v_s = chen_u3v2(yuv.u, yuv.v)
    elif method == "CD":
        u_s, v_s = color_domination(yuv.u, yuv.v)
    else:
        u_s = subsample_baseline(BaselineMethod(method), yuv.u)
        v_s = subsample_baseline(BaselineMethod(method), yuv.v)
    return SubsampledChromaImage(clamp_quantize(u_s), clamp_quantize(v_s)), None


def _prepare(rgb: RgbImage, cfg: PipelineConfig):
    """Simulate the sensor; returns (pattern, truth, yuv seen by the encoder).

    For full-color input the encoder sees the image itself. For CFA kinds
    the truth is the mosaic and the encoder sees its demosaiced version,
    which is all a real camera pipeline would have.
    """
    pattern = cfg.pattern
    if pattern.kind is PatternKind.RGB:
        return pattern, rgb, rgb_image_to_yuv(rgb)
    truth = mosaic(rgb, pattern)
    return pattern, truth, rgb_image_to_yuv(demosaic_bilinear(truth))


def _score(kind: PatternKind, truth, rec_yuv: YuvImage, pattern):
    if kind is PatternKind.RGB:
        rec = clamp_quantize_rgb(yuv_image_to_rgb(rec_yuv))
        return cpsnr(truth, rec), ssim_rgb(truth, rec)
    rec = reconstruct_cfa(rec_yuv, pattern)
    return psnr_gray(truth, rec), ssim_cfa(truth, rec)


def process_image(name: str, rgb: RgbImage, cfg: PipelineConfig) -> list[ReportRow]:
    """All report rows for one image, in configured method/upsampler order."""
    pattern, truth, yuv = _prepare(rgb, cfg)
    rows = []
    for method in cfg.methods:
        t0 = time.perf_counter()
        sub, mean_iters = _encode(yuv, pattern, method, cfg)
        elapsed = time.perf_counter() - t0
        for up_name in cfg.upsamplers:
            up = UpsampleMethod(up_name)
            rec_yuv = YuvImage(yuv.y, upsample(up, sub.u_s), upsample(up, sub.v_s))
            quality, structural = _score(pattern.kind, truth, rec_yuv, pattern)
            rows.append(
                ReportRow(
                    image=name,
                    kind=pattern.kind.value,
                    variant=pattern.variant,
                    method=method,
                    upsampler=up_name,
                    metric=_METRIC_BY_KIND[pattern.kind],
                    quality_db=quality,
                    ssim=structural,
                    mean_iterations=mean_iters,
                    subsample_seconds=elapsed,
                )
            )
    return rows


def run_pipeline(cfg: PipelineConfig, images: Sequence[tuple[str, RgbImage]]) -> RunReport:
    """Score every configured cell for every image.

    A failing image contributes an error entry instead of rows and never
    aborts the remaining images.
    """
    names = [name for name, _ in images]
    if len(set(names)) != len(names):
        raise ValueError("image names must be unique")
    results: list[list[ReportRow]] = [[] for _ in images]
    errors: list[tuple[str, str]] = []
    if cfg.jobs > 1 and len(images) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = {
                pool.submit(process_image, name, rgb, cfg): k
                for k, (name, rgb) in enumerate(images)
            }
            for future, k in futures.items():
                try:
                    results[k] = future.result()
                except ChromaSubError as exc:
                    errors.append((names[k], f"{type(exc).__name__}: {exc}"))
    else:
        for k, (name, rgb) in enumerate(images):
            try:
                results[k] = process_image(name, rgb, cfg)
            except ChromaSubError as exc:
                errors.append((name, f"{type(exc).__name__}: {exc}"))
    rows = tuple(row for per_image in results for row in per_image)
    pattern = cfg.pattern
    aggregates = []
    for method in cfg.methods:
        for up_name in cfg.upsamplers:
            cell = [r for r in rows if r.method == method and r.upsampler == up_name]
            finite = [r.quality_db for r in cell if math.isfinite(r.quality_db)]
            mean_db = mean_finite_db([r.quality_db for r in cell]) if cell else None
            aggregates.append(
                AggregateRow(
                    method=method,
                    upsampler=up_name,
                    metric=_METRIC_BY_KIND[pattern.kind],
                    mean_quality_db=mean_db,
                    mean_ssim=sum(r.ssim for r in cell) / len(cell) if cell else 0.0,
                    images=len(cell),
                    excluded=len(cell) - len(finite),
                )
            )
    return RunReport(
        schema=SCHEMA,
        kind=pattern.kind.value,
        variant=pattern.variant,
        future_method=cfg.future_method,
        seed=cfg.seed,
        rows=rows,
        aggregates=tuple(aggregates),
        errors=tuple(sorted(errors)),
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def render_report_csv(report: RunReport) -> str:
    lines = [f"# {report.schema}"]
    lines.append(
        f"# kind={report.kind} variant={report.variant} "
        f"future_method={report.future_method} seed={report.seed}"
    )
    lines.append(
        "image,kind,variant,method,upsampler,metric,"
        "quality_db,ssim,mean_iterations,subsample_seconds"
    )
    for r in report.rows:
        lines.append(
            ",".join(
                (
                    r.image,
                    r.kind,
                    r.variant,
                    r.method,
                    r.upsampler,
                    r.metric,
                    _fmt(r.quality_db),
                    _fmt(r.ssim),
                    _fmt(r.mean_iterations),
                    _fmt(r.subsample_seconds),
                )
            )
        )
    lines.append("# aggregates")
    lines.append("method,upsampler,metric,mean_quality_db,mean_ssim,images,excluded")
    for a in report.aggregates:
        lines.append(
            ",".join(
                (
                    a.method,
                    a.upsampler,
                    a.metric,
                    _fmt(a.mean_quality_db),
                    _fmt(a.mean_ssim),
                    str(a.images),
                    str(a.excluded),
                )
            )
        )
    if report.errors:
        lines.append("# errors")
        for name, message in report.errors:
            escaped = message.replace(",", ";")
            lines.append(f"{name},{escaped}")
    return "\n".join(lines) + "\n"


def _json_db(value):
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def render_report_json(report: RunReport) -> str:
    import json

    doc = {
        "schema": report.schema,
        "kind": report.kind,
        "variant": report.variant,
        "future_method": report.future_method,
        "seed": report.seed,
        "rows": [
            {
                "image": r.image,
                "kind": r.kind,
                "variant": r.variant,
                "method": r.method,
                "upsampler": r.upsampler,
                "metric": r.metric,
                "quality_db": _json_db(r.quality_db),
                "ssim": r.ssim,
                "mean_iterations": r.mean_iterations,
                "subsample_seconds": r.subsample_seconds,
            }
            for r in report.rows
        ],
        "aggregates": [
            {
                "method": a.method,
                "upsampler": a.upsampler,
                "metric": a.metric,
                "mean_quality_db": _json_db(a.mean_quality_db),
                "mean_ssim": a.mean_ssim,
                "images": a.images,
                "excluded": a.excluded,
            }
            for a in report.aggregates
        ],
        "errors": [{"image": n, "message": m} for n, m in report.errors],
    }
    return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class ConvexityRow:
    """Curvature audit for one pattern.

    ``expected`` pins the determinant value for the canonical layouts;
    ``passed`` is None when a pattern has no pinned expectation.
    """

    kind: str
    variant: str
    curvature_u: float
    curvature_v: float
    determinant: float
    positive_definite: bool
    expected: Optional[float]
    passed: Optional[bool]


_EXPECTED_DETERMINANTS = {
    PatternKind.RGB: 86.2040,
    PatternKind.BAYER: 6.6216,
    PatternKind.DTDI: 26.4863,
}

DETERMINANT_TOLERANCE = 1e-3


def verify_convexity() -> tuple[ConvexityRow, ...]:
    """Audit the distortion curvature of every supported pattern.

    The Hessian depends only on the pattern, so this needs no image data.
    The determinant is pinned per kind because every variant of a kind
    records the same multiset of channels.
    """
    out = []
    for pattern in supported_patterns():
        h = hessian(pattern)
        det = hessian_det(pattern)
        pd = h[0, 0] > 0.0 and det > 0.0
        expected = _EXPECTED_DETERMINANTS.get(pattern.kind)
        passed = None
        if expected is not None:
            passed = abs(det - expected) <= DETERMINANT_TOLERANCE and pd
        out.append(
            ConvexityRow(
                kind=pattern.kind.value,
                variant=pattern.variant,
                curvature_u=float(h[0, 0]),
                curvature_v=float(h[1, 1]),
                determinant=det,
                positive_definite=pd,
                expected=expected,
                passed=passed,
            )
        )
    return tuple(out)


def render_convexity(rows: Sequence[ConvexityRow]) -> str:
    lines = ["kind/variant  curvature_u  curvature_v  determinant  expected  status"]
    for r in rows:
        status = "PASS" if r.passed else ("FAIL" if r.passed is not None else "-")
        expected = f"{r.expected:.4f}" if r.expected is not None else "-"
        lines.append(
            f"{r.kind + '/' + r.variant:<13} {r.curvature_u:>11.6f} {r.curvature_v:>12.6f} "
            f"{r.determinant:>12.6f} {expected:>9} {status:>7}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolverAudit:
    """How the integer descent compares against exhaustive search."""

    blocks: int
    hits: int
    hit_rate: float
    max_gap: float
    monotone: bool
    never_worse_than_start: bool
    mean_iterations: float
    max_iterations: int


def audit_solver(
    cfg: PipelineConfig,
    images: Sequence[tuple[str, RgbImage]],
    sample_blocks: int = 1000,
) -> SolverAudit:
    """Run full sweeps and compare sampled blocks to the exhaustive oracle.

    ``sample_blocks`` block positions are drawn without replacement across
    the images using the config seed. Every solved block (sampled or not)
    contributes to the iteration and monotonicity statistics.
    """
    rng = np.random.default_rng(cfg.seed)
    pattern = cfg.pattern
    per_image = max(1, -(-sample_blocks // max(1, len(images))))
    hits = blocks = 0
    max_gap = 0.0
    monotone = True
    never_worse = True
    total_iters = 0
    peak_iters = 0
    solved = 0
    trace_cfg = SolverConfig(emit_trace=True)
    for name, rgb in images:
        _, _, yuv = _prepare(rgb, cfg)
        bw, bh = block_grid_shape(yuv.u)
        want = min(per_image, bw * bh, max(0, sample_blocks - blocks))
        chosen = set(int(i) for i in rng.choice(bw * bh, size=want, replace=False))
        stats = {"hits": 0, "checked": 0, "max_gap": 0.0}

        def check(index, model, result, _stats=stats, _chosen=chosen, _bw=bw):
            nonlocal monotone, never_worse, total_iters, peak_iters, solved
            solved += 1
            total_iters += result.iterations
            peak_iters = max(peak_iters, result.iterations)
            path = result.trace
            for a, b in zip(path, path[1:]):
                if not b[2] < a[2]:
                    monotone = False
            if not result.distortion <= path[0][2]:
                never_worse = False
            flat = index.by * _bw + index.bx
            if flat in _chosen:
                _stats["checked"] += 1
                bu, bv, bd = brute_force(model)
                gap = result.distortion - bd
                if gap <= 1e-9 * (1.0 + bd):
                    _stats["hits"] += 1
                _stats["max_gap"] = max(_stats["max_gap"], gap)
            return False

        subsample_image(
            yuv,
            pattern,
            config=trace_cfg,
            future_method=BaselineMethod(cfg.future_method),
            on_block=check,
        )
        hits += stats["hits"]
        blocks += stats["checked"]
        max_gap = max(max_gap, stats["max_gap"])
        if blocks >= sample_blocks:
            break
    return SolverAudit(
        blocks=blocks,
        hits=hits,
        hit_rate=hits / blocks if blocks else 0.0,
        max_gap=max_gap,
        monotone=monotone,
        never_worse_than_start=never_worse,
        mean_iterations=total_iters / solved if solved else 0.0,
        max_iterations=peak_iters,
    )


@dataclass(frozen=True, eq=False)
class BlockTrace:
    """Full picture of one block's solve: the distortion surface over all
    integer candidates, the continuous minimizer, and the descent path."""

    index: BlockIndex
    grid: np.ndarray
    continuous_minimizer: tuple[float, float]
    result: SolverResult


def trace_block(cfg: PipelineConfig, rgb: RgbImage, index: BlockIndex) -> BlockTrace:
    """Solve one image up to a block and capture that block's surface.

    The sweep processes every block before the target in row-major order
    so the captured model sees exactly the neighbor values a full encode
    would use.
    """
    pattern = cfg.pattern
    _, _, yuv = _prepare(rgb, cfg)
    bw, bh = block_grid_shape(yuv.u)
    if not (0 <= index.bx < bw and 0 <= index.by < bh):
        raise GeometryError(f"block {tuple(index)} outside grid {bw}x{bh}")
    captured = {}

    def capture(idx, model, result):
        if idx == index:
            captured["model"] = model
            captured["result"] = result
            return True
        return False

    subsample_image(
        yuv,
        pattern,
        config=SolverConfig(emit_trace=True),
        future_method=BaselineMethod(cfg.future_method),
        on_block=capture,
    )
    model = captured["model"]
    u = np.arange(256.0)[:, None]
    v = np.arange(256.0)[None, :]
    return BlockTrace(
        index=index,
        grid=evaluate_grid(model, u, v),
        continuous_minimizer=closed_form(model),
        result=captured["result"],
    )


def render_trace_grid_csv(trace: BlockTrace) -> str:
    """256 rows (u) of 256 comma-separated distortions (v)."""
    lines = [",".join(repr(float(x)) for x in row) for row in trace.grid]
    return "\n".join(lines) + "\n"


def render_trace_path(trace: BlockTrace) -> str:
    """One 'k u v D' line per visited candidate, starting at the rounded
    continuous minimizer."""
    lines = [f"{k} {u} {v} {repr(d)}" for k, (u, v, d) in enumerate(trace.result.trace)]
    return "\n".join(lines) + "\n"
