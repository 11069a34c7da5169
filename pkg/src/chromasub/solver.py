"""Integer-domain minimization of the block distortion and full-image sweeps.

The continuous minimizer of a block's quadratic is almost never a valid
8-bit pair, so the solver rounds it into the lattice and walks downhill
over the 8-connected integer neighborhood until no step improves. The
quadratic's convexity keeps that walk short and the exhaustive grid search
(`brute_force`) provides an oracle for auditing how often the walk lands
on the true integer minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .colorspace import clamp_quantize, quantize_sample
from .errors import SolverError
from .geometry import BlockIndex, ImagePlane, SubsampledChromaImage, YuvImage
from .model import (
    BT601_COEFFS,
    DEFAULT_WEIGHTS,
    BilinearWeights,
    BlockContext,
    ChannelCoeffs,
    DistortionModel,
    NeighborChroma,
    build_model,
    closed_form,
    evaluate,
    evaluate_grid,
)
from .subsample import BaselineMethod, subsample_baseline

NEIGHBOR_STEPS = (
    (0, 1),
    (0, -1),
    (1, 0),
    (-1, 0),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 1024
    emit_trace: bool = False


@dataclass(frozen=True)
class SolverResult:
    """Outcome of one block solve.

    ``iterations`` counts accepted downhill moves; ``trace`` (when
    requested) lists every visited (u, v, distortion) starting at the
    rounded closed-form point.
    """

    u_s: int
    v_s: int
    distortion: float
    iterations: int
    trace: Optional[tuple[tuple[int, int, float], ...]] = None


def solve(model: DistortionModel, config: SolverConfig | None = None) -> SolverResult:
    """Descend from the rounded continuous minimizer to an integer local minimum.

    Each round scans the eight neighbors in a fixed order and moves to the
    first strictly smaller distortion among the best found; a round with no
    strict improvement terminates. Candidates outside [0, 255]^2 are
    skipped. Raises SolverError (carrying the best result so far) if the
    iteration cap is hit, which convexity should make impossible.
    """
    cfg = config or SolverConfig()
    u0, v0 = closed_form(model)
    u = quantize_sample(u0)
    v = quantize_sample(v0)
    d = evaluate(model, u, v)
    trace = [(u, v, d)] if cfg.emit_trace else None
    iterations = 0
    while True:
        best_u = best_v = -1
        best_d = None
        for m, n in NEIGHBOR_STEPS:
            uu = u + m
            vv = v + n
            if uu < 0 or uu > 255 or vv < 0 or vv > 255:
                continue
            dd = evaluate(model, uu, vv)
            if best_d is None or dd < best_d:
                best_u, best_v, best_d = uu, vv, dd
        if best_d is None or best_d >= d:
            return SolverResult(u, v, d, iterations, tuple(trace) if trace is not None else None)
        if iterations >= cfg.max_iterations:
            best = SolverResult(u, v, d, iterations, tuple(trace) if trace is not None else None)
            raise SolverError(
                f"no local minimum within {cfg.max_iterations} iterations", best=best
            )
        u, v, d = best_u, best_v, best_d
        iterations += 1
        if trace is not None:
            trace.append((u, v, d))


def brute_force(model: DistortionModel) -> tuple[int, int, float]:
    """Exhaustive search over all 65536 integer pairs.

    Ties break toward the smallest u, then the smallest v. Distortions come
    from the vectorized evaluator, which matches ``evaluate`` bit for bit.
    """
    u = np.arange(256.0)[:, None]
    v = np.arange(256.0)[None, :]
    grid = evaluate_grid(model, u, v)
    flat = int(np.argmin(grid))
    return (flat // 256, flat % 256, float(grid.flat[flat]))


OnBlock = Callable[[BlockIndex, DistortionModel, SolverResult], object]


def subsample_image(
    yuv: YuvImage,
    pattern,
    *,
    config: SolverConfig | None = None,
    future_method: BaselineMethod = BaselineMethod.A,
    coeffs: ChannelCoeffs = BT601_COEFFS,
    weights: BilinearWeights = DEFAULT_WEIGHTS,
    on_block: OnBlock | None = None,
) -> SubsampledChromaImage:
    """Solve every block of an image in a single row-major sequential sweep.

    Work planes start as the quantized ``future_method`` pre-pass; each
    solved block overwrites its own entry before the sweep moves on. All
    eight neighbor reads come from the work planes at clamped block
    coordinates, so positions behind the sweep are final, positions ahead
    still hold pre-pass values, and border blocks fall back to their own
    row or column. Blocks are strictly sequential by design: each solve
    depends on the finalized values of its left and upper neighbors, so
    there is no safe intra-image parallelism.

    ``on_block`` is called after each block with (index, model, result);
    returning a truthy value stops the sweep early and the returned image
    then still holds pre-pass values from the stop point onward.
    """
    cfg = config or SolverConfig()
    work_u = clamp_quantize(subsample_baseline(future_method, yuv.u)).data.tolist()
    work_v = clamp_quantize(subsample_baseline(future_method, yuv.v)).data.tolist()
    bh = len(work_u)
    bw = len(work_u[0])
    u_rows = yuv.u.data.tolist()
    v_rows = yuv.v.data.tolist()
    y_rows = yuv.y.data.tolist()
    for by in range(bh):
        ym = by - 1 if by > 0 else 0
        yp = by + 1 if by + 1 < bh else bh - 1
        for bx in range(bw):
            xm = bx - 1 if bx > 0 else 0
            xp = bx + 1 if bx + 1 < bw else bw - 1
            neighbors = NeighborChroma(
                tl=(work_u[ym][xm], work_v[ym][xm]),
                t=(work_u[ym][bx], work_v[ym][bx]),
                tr=(work_u[ym][xp], work_v[ym][xp]),
                l=(work_u[by][xm], work_v[by][xm]),
                r=(work_u[by][xp], work_v[by][xp]),
                bl=(work_u[yp][xm], work_v[yp][xm]),
                b=(work_u[yp][bx], work_v[yp][bx]),
                br=(work_u[yp][xp], work_v[yp][xp]),
            )
            py, px = 2 * by, 2 * bx
            yuv_block = (
                (y_rows[py][px], u_rows[py][px], v_rows[py][px]),
                (y_rows[py][px + 1], u_rows[py][px + 1], v_rows[py][px + 1]),
                (y_rows[py + 1][px], u_rows[py + 1][px], v_rows[py + 1][px]),
                (y_rows[py + 1][px + 1], u_rows[py + 1][px + 1], v_rows[py + 1][px + 1]),
            )
            context = BlockContext(pattern=pattern, yuv_block=yuv_block, neighbors=neighbors)
            model = build_model(context, coeffs, weights)
            result = solve(model, cfg)
            work_u[by][bx] = float(result.u_s)
            work_v[by][bx] = float(result.v_s)
            if on_block is not None and on_block(BlockIndex(bx, by), model, result):
                return SubsampledChromaImage(ImagePlane(np.array(work_u)), ImagePlane(np.array(work_v)))
    return SubsampledChromaImage(ImagePlane(np.array(work_u)), ImagePlane(np.array(work_v)))
