"""Chroma subsampling toolkit.

Encodes 4:2:0 chroma for full-color, Bayer, and dual-exposure sensor
images by minimizing a convex per-block reconstruction-error model over
the 8-bit integer lattice, and ships the baselines, codecs, metrics, and
reporting needed to evaluate it.
"""

from .colorspace import (
    clamp_quantize,
    clamp_quantize_rgb,
    quantize_sample,
    rgb_image_to_yuv,
    rgb_to_yuv,
    yuv_image_to_rgb,
    yuv_to_rgb,
)
from .errors import (
    ChromaSubError,
    ComparisonError,
    GeometryError,
    MetricError,
    ModelError,
    PatternError,
    SolverError,
)
from .geometry import (
    BlockIndex,
    ImagePlane,
    RgbImage,
    SubsampledChromaImage,
    YuvImage,
    block_at,
    block_grid_shape,
    iter_block_indices,
)
from .metrics import cpsnr, mean_finite_db, psnr_gray, ssim, ssim_cfa, ssim_rgb
from .model import (
    BT601_COEFFS,
    DEFAULT_WEIGHTS,
    BilinearWeights,
    BlockContext,
    ChannelCoeffs,
    DistortionModel,
    NeighborChroma,
    build_model,
    block_estimates,
    closed_form,
    evaluate,
    evaluate_grid,
    gradient,
    hessian,
    hessian_det,
)
from .mosaic import (
    CfaImage,
    cfa_block_distortion,
    demosaic_bilinear,
    mosaic,
    reconstruct_cfa,
)
from .netpbm import load_cfa, read_pgm, read_ppm, save_cfa, write_pgm, write_ppm
from .patterns import CfaPattern, PatternKind, pattern_for, supported_patterns
from .pipeline import (
    PipelineConfig,
    RunReport,
    audit_solver,
    run_pipeline,
    trace_block,
    verify_convexity,
)
from .solver import (
    NEIGHBOR_STEPS,
    SolverConfig,
    SolverResult,
    brute_force,
    solve,
    subsample_image,
)
from .subsample import (
    BaselineMethod,
    MPEG_B_TAPS,
    chen_u3v2,
    color_domination,
    subsample_baseline,
)
from .upsample import UpsampleMethod, upsample

__version__ = "0.1.0"
