"""Dual-tree complex wavelet scattering: forward cascade, exact-phase
inversion, cross-orientation filtering, and a corpus visualization
pipeline with a small CLI."""

from .crossorient import (
    CrossOrientFilter,
    ExtendedBands,
    adjoint_cross_filter,
    apply_cross_filter,
    extend_orientations,
    filter_gallery,
    fold_orientations,
    make_rototranslation_bank,
    modulus_v,
    reconstruct_filter_shape,
    roll_filter,
)
from .descattering import (
    CoefficientMask,
    descatter,
    invert_lowpass,
    invert_modulus,
)
from .dtcwt import ComplexPyramid, forward, inverse, pad_to_multiple, unpad
from .errors import (
    ConsistencyError,
    DimensionError,
    FormatError,
    ParameterError,
    ScaleError,
    UnsupportedOrderError,
    ValidationError,
)
from .scattering import (
    PhaseStore,
    PropagatedSignal,
    ScatterConfig,
    ScatterOutput,
    channel_descriptors,
    lowpass_project,
    luminance_split,
    scatter,
)
from .tensorio import read_tensor, write_tensor
from .vizpipeline import (
    ActivationRecord,
    DirectoryCorpus,
    RunReport,
    TopKTable,
    identify,
    reconstruct_topk,
    render_grid,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationRecord",
    "CoefficientMask",
    "ComplexPyramid",
    "ConsistencyError",
    "CrossOrientFilter",
    "DimensionError",
    "DirectoryCorpus",
    "ExtendedBands",
    "FormatError",
    "ParameterError",
    "PhaseStore",
    "PropagatedSignal",
    "RunReport",
    "ScaleError",
    "ScatterConfig",
    "ScatterOutput",
    "TopKTable",
    "UnsupportedOrderError",
    "ValidationError",
    "adjoint_cross_filter",
    "apply_cross_filter",
    "channel_descriptors",
    "descatter",
    "extend_orientations",
    "filter_gallery",
    "fold_orientations",
    "forward",
    "identify",
    "inverse",
    "invert_lowpass",
    "invert_modulus",
    "lowpass_project",
    "luminance_split",
    "make_rototranslation_bank",
    "modulus_v",
    "pad_to_multiple",
    "read_tensor",
    "reconstruct_filter_shape",
    "reconstruct_topk",
    "render_grid",
    "roll_filter",
    "scatter",
    "unpad",
    "write_tensor",
]
