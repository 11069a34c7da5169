"""Convex reconstruction-error model for one 2x2 chroma block.

Given a candidate subsampled pair (U_s, V_s) for a block, the decoder will
rebuild each pixel's chroma by bilinear interpolation against the block's
own pair and the eight neighboring pairs. Pushing the resulting chroma
estimation errors through the linear YUV-to-RGB map yields, for exactly
the channels present at each pixel, a squared color error

    D(U_s, V_s) = sum_i sum_c [ a_c (w U_s + du_i) + b_c (w V_s + dv_i) ]^2

with w = 9/16 the self weight of the interpolation, du_i / dv_i the fixed
part of the estimation error at pixel i, and (a_c, b_c) the chroma columns
of the conversion matrix for channel c. D is a positive semidefinite
quadratic in (U_s, V_s); whenever the channel mix makes it strictly convex
it has one real minimizer with a closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .patterns import CHANNELS, CfaPattern

Pair = tuple[float, float]
Triple = tuple[float, float, float]


@dataclass(frozen=True)
class ChannelCoeffs:
    """Per-channel sensitivity of reconstructed color to chroma error.

    A unit error in estimated U changes channel c by ``a(c)`` and a unit
    error in estimated V changes it by ``b(c)``; the tuples are in (R, G, B)
    order and equal the chroma columns of the YUV-to-RGB matrix.
    """

    u_error: Triple = (0.0, -0.391, 2.018)
    v_error: Triple = (1.596, -0.813, 0.0)

    def a(self, channel: str) -> float:
        return self.u_error[CHANNELS.index(channel)]

    def b(self, channel: str) -> float:
        return self.v_error[CHANNELS.index(channel)]


BT601_COEFFS = ChannelCoeffs()


@dataclass(frozen=True)
class BilinearWeights:
    """Interpolation weights at the four pixel offsets inside a block.

    Each pixel sits a quarter block away from its own chroma site along
    both axes, so it blends the self site, the two adjacent edge sites,
    and one corner site. The weights must sum to one.
    """

    w_self: float = 9.0 / 16.0
    edge: float = 3.0 / 16.0
    corner: float = 1.0 / 16.0

    def __post_init__(self):
        total = self.w_self + 2.0 * self.edge + self.corner
        if total != 1.0:
            raise ValueError(f"interpolation weights sum to {total}, need exactly 1")


DEFAULT_WEIGHTS = BilinearWeights()


@dataclass(frozen=True)
class NeighborChroma:
    """The eight neighboring subsampled chroma pairs around one block.

    ``tl``, ``t``, ``tr`` and ``l`` lie behind a row-major sweep and hold
    final values; ``r``, ``bl``, ``b`` and ``br`` lie ahead and hold
    pre-pass estimates. Each field is a (U, V) pair.
    """

    tl: Pair
    t: Pair
    tr: Pair
    l: Pair
    r: Pair
    bl: Pair
    b: Pair
    br: Pair

    @classmethod
    def constant(cls, u: float, v: float) -> "NeighborChroma":
        p = (float(u), float(v))
        return cls(p, p, p, p, p, p, p, p)


@dataclass(frozen=True)
class BlockContext:
    """Everything needed to model one block.

    ``yuv_block`` holds the four full-resolution (Y, U, V) triples in
    zigzag order; Y is carried along for downstream reconstruction but the
    chroma error model only reads U and V.
    """

    pattern: CfaPattern
    yuv_block: tuple[Triple, Triple, Triple, Triple]
    neighbors: NeighborChroma

    def __post_init__(self):
        if len(self.yuv_block) != 4:
            raise ModelError(f"need 4 pixel triples, got {len(self.yuv_block)}")


@dataclass(frozen=True)
class ResidualTerms:
    """Fixed interpolation contributions per zigzag position.

    ``ubar[i]`` / ``vbar[i]`` collect the neighbor-weighted part of the
    estimate at pixel i, so the full estimate is w_self * U_s + ubar[i].
    """

    ubar: tuple[float, float, float, float]
    vbar: tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class DistortionModel:
    """Quadratic block distortion, precomputed for fast point evaluation.

    ``terms`` lists one (a, b, du, dv) tuple per recorded channel per
    pixel, in zigzag-position then color-set order; keeping that order
    fixed makes every evaluation bitwise reproducible.
    """

    pattern: CfaPattern
    coeffs: ChannelCoeffs
    weights: BilinearWeights
    residuals: ResidualTerms
    targets: tuple[Pair, Pair, Pair, Pair]
    terms: tuple[tuple[float, float, float, float], ...]


def _neighbor_mix(n: NeighborChroma, weights: BilinearWeights, component: int):
    """Neighbor-weighted estimate parts for the four zigzag positions.

    Each pixel borrows from the two edge neighbors flanking its corner of
    the block plus the diagonal corner neighbor.
    """
    e, c = weights.edge, weights.corner
    tl, t, tr, l = n.tl[component], n.t[component], n.tr[component], n.l[component]
    r, bl, b, br = n.r[component], n.bl[component], n.b[component], n.br[component]
    return (
        c * tl + e * t + e * l,
        c * tr + e * t + e * r,
        c * bl + e * b + e * l,
        c * br + e * b + e * r,
    )


def build_model(
    context: BlockContext,
    coeffs: ChannelCoeffs = BT601_COEFFS,
    weights: BilinearWeights = DEFAULT_WEIGHTS,
) -> DistortionModel:
    """Assemble the distortion quadratic for one block.

    Raises ModelError when the pattern's channel mix leaves the quadratic
    degenerate (no unique minimizer).
    """
    ubar = _neighbor_mix(context.neighbors, weights, 0)
    vbar = _neighbor_mix(context.neighbors, weights, 1)
    targets = tuple((float(t[1]), float(t[2])) for t in context.yuv_block)
    terms = []
    for i in range(4):
        du = ubar[i] - targets[i][0]
        dv = vbar[i] - targets[i][1]
        for ch in context.pattern.color_sets[i]:
            terms.append((coeffs.a(ch), coeffs.b(ch), du, dv))
    model = DistortionModel(
        pattern=context.pattern,
        coeffs=coeffs,
        weights=weights,
        residuals=ResidualTerms(ubar, vbar),
        targets=targets,
        terms=tuple(terms),
    )
    a2, b2, ab = _coefficient_sums(model)
    if abs(ab * ab - a2 * b2) < 1e-12:
        raise ModelError(
            f"pattern {context.pattern.kind.value}/{context.pattern.variant} "
            "gives a degenerate quadratic with no unique minimizer"
        )
    return model


def _coefficient_sums(model: DistortionModel) -> tuple[float, float, float]:
    """(sum a^2, sum b^2, sum a*b) over all terms of the model."""
    a2 = b2 = ab = 0.0
    for a, b, _, _ in model.terms:
        a2 += a * a
        b2 += b * b
        ab += a * b
    return a2, b2, ab


def evaluate(model: DistortionModel, u_s: float, v_s: float) -> float:
    """Block distortion at one candidate pair."""
    w = model.weights.w_self
    wu = w * u_s
    wv = w * v_s
    total = 0.0
    for a, b, du, dv in model.terms:
        e = a * (wu + du) + b * (wv + dv)
        total += e * e
    return total


def evaluate_grid(model: DistortionModel, u_s, v_s) -> np.ndarray:
    """Vectorized ``evaluate`` over broadcastable candidate arrays.

    Terms accumulate in the same order as the scalar path, so values agree
    bit for bit with per-point evaluation.
    """
    w = model.weights.w_self
    wu = w * np.asarray(u_s, dtype=np.float64)
    wv = w * np.asarray(v_s, dtype=np.float64)
    total = np.zeros(np.broadcast(wu, wv).shape)
    for a, b, du, dv in model.terms:
        e = a * (wu + du) + b * (wv + dv)
        total = total + e * e
    return total


def gradient(model: DistortionModel, u_s: float, v_s: float) -> tuple[float, float]:
    """Analytic gradient of the distortion at one candidate pair."""
    w = model.weights.w_self
    wu = w * u_s
    wv = w * v_s
    gu = gv = 0.0
    for a, b, du, dv in model.terms:
        e = a * (wu + du) + b * (wv + dv)
        gu += 2.0 * w * a * e
        gv += 2.0 * w * b * e
    return (gu, gv)


def hessian(
    pattern: CfaPattern,
    coeffs: ChannelCoeffs = BT601_COEFFS,
    weights: BilinearWeights = DEFAULT_WEIGHTS,
) -> np.ndarray:
    """Constant 2x2 Hessian of the distortion for a given pattern.

    The curvature depends only on which channels the pattern records, not
    on image content, so convexity can be audited without any pixels.
    """
    w = weights.w_self
    a2 = b2 = ab = 0.0
    for color_set in pattern.color_sets:
        for ch in color_set:
            a, b = coeffs.a(ch), coeffs.b(ch)
            a2 += a * a
            b2 += b * b
            ab += a * b
    return np.array([[2.0 * w * w * a2, 2.0 * w * w * ab], [2.0 * w * w * ab, 2.0 * w * w * b2]])


def hessian_det(
    pattern: CfaPattern,
    coeffs: ChannelCoeffs = BT601_COEFFS,
    weights: BilinearWeights = DEFAULT_WEIGHTS,
) -> float:
    h = hessian(pattern, coeffs, weights)
    return float(h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0])


def closed_form(model: DistortionModel) -> tuple[float, float]:
    """The unconstrained real minimizer of the block distortion.

    Solves the 2x2 linear system from setting the gradient to zero.
    Raises ModelError if the system is numerically singular.
    """
    w = model.weights.w_self
    a2, b2, ab = _coefficient_sums(model)
    p = q = 0.0
    for a, b, du, dv in model.terms:
        p += a * a * du + a * b * dv
        q += b * b * dv + a * b * du
    den = w * (ab * ab - a2 * b2)
    if abs(den) < 1e-12:
        raise ModelError("degenerate quadratic, closed-form minimizer undefined")
    u0 = (b2 * p - ab * q) / den
    v0 = (a2 * q - ab * p) / den
    return (u0, v0)


def block_estimates(model: DistortionModel, u_s: float, v_s: float):
    """The four interpolated (U', V') pairs implied by a candidate."""
    w = model.weights.w_self
    ub, vb = model.residuals.ubar, model.residuals.vbar
    return tuple((w * u_s + ub[i], w * v_s + vb[i]) for i in range(4))
