"""Sparse image representation by generalised inpainting.

Reconstructs images from sparse linear feature constraints (colour
values, derivatives, local averages) via a symmetric indefinite
saddle-point solve, and optimises which features to store, where, and
with what values.
"""

from .errors import (
    DimensionMismatchError,
    EmptyMaskError,
    GimError,
    MalformedHeaderError,
    MaskFileError,
    MaskSaturatedError,
    PnmError,
    SolverBreakdownError,
    TruncatedPayloadError,
    UnsupportedMaxvalError,
)
from .image import ErrorReport, PixelGrid, mse, read_pnm, write_pnm
from .inpaint import (
    InpaintProblem,
    inpaint,
    reconstruct,
    reconstruct_adjoint,
    reconstruction_operator,
)
from .masks import (
    MaskSet,
    extract_feature_values,
    load_masks,
    mask_density,
    save_masks,
)
from .operators import (
    DEFAULT_CATALOGUE,
    FeatureKind,
    GridGeometry,
    LinearOperator,
    feature_adjoint_apply,
    feature_apply,
    feature_operator,
    laplacian_apply,
    laplacian_operator,
    saddle_apply,
    saddle_operator,
    stacked_adjoint_apply,
    stacked_apply,
    stacked_operator,
)
from .solvers import SolverConfig, SolverReport, cgnr, symmlq
from .spatial import (
    CellScore,
    DensifyConfig,
    DensifyResult,
    VoronoiLabeling,
    densify,
    error_maps,
    select_and_insert,
    uniform_seed,
    voronoi_partition,
)
from .tonal import TonalConfig, TonalResult, tonal_optimise

__version__ = "0.1.0"

__all__ = [
    "CellScore",
    "DEFAULT_CATALOGUE",
    "DensifyConfig",
    "DensifyResult",
    "DimensionMismatchError",
    "EmptyMaskError",
    "ErrorReport",
    "FeatureKind",
    "GimError",
    "GridGeometry",
    "InpaintProblem",
    "LinearOperator",
    "MalformedHeaderError",
    "MaskFileError",
    "MaskSaturatedError",
    "MaskSet",
    "PixelGrid",
    "PnmError",
    "SolverBreakdownError",
    "SolverConfig",
    "SolverReport",
    "TonalConfig",
    "TonalResult",
    "TruncatedPayloadError",
    "UnsupportedMaxvalError",
    "VoronoiLabeling",
    "cgnr",
    "densify",
    "error_maps",
    "extract_feature_values",
    "feature_adjoint_apply",
    "feature_apply",
    "feature_operator",
    "inpaint",
    "laplacian_apply",
    "laplacian_operator",
    "load_masks",
    "mask_density",
    "mse",
    "read_pnm",
    "reconstruct",
    "reconstruct_adjoint",
    "reconstruction_operator",
    "saddle_apply",
    "saddle_operator",
    "save_masks",
    "select_and_insert",
    "stacked_adjoint_apply",
    "stacked_apply",
    "stacked_operator",
    "symmlq",
    "tonal_optimise",
    "uniform_seed",
    "voronoi_partition",
    "write_pnm",
]
