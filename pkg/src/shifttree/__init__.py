"""Left-invertible weighted shifts on directed trees and their analytic models."""

__version__ = "0.1.0"

from .errors import (
    InvalidParam,
    InvalidTree,
    InvalidWeights,
    NoGeneralizedRoot,
    NotFredholm,
    NotLeftInvertible,
    OnEssentialSpectrum,
    OutsideDelta,
    OutsideDisc,
    ShiftTreeError,
    SpecParseError,
    UnknownBuiltin,
    UnknownVertex,
)
from .tree import BUILTIN_NAMES, Core, DirectedTree, Ray, builtin
from .weights import WeightSequence
from .shift import (
    SparseVector,
    WeightedShift,
    apply,
    apply_adjoint,
    apply_adjoint_power,
    apply_power,
    cauchy_dual,
    column_norm,
    spectral_radius,
)
from .model import (
    basis_polynomial,
    coefficient_block,
    cokernel_basis,
    kernel_partial_sum,
    model_coefficients,
    radius_of_convergence,
    reproducing_check,
)
from .spectra import (
    ap_spectrum_annuli,
    chi_ker_check,
    cowen_douglas_field,
    dim_ker_adjoint_power,
    fredholm_index,
    quotient_dims,
    unilateral_decomposition,
)
from .rootless import RootlessShift, decompose, generalized_root, index_relation, self_commutator_blocks
from .loader import load_spec, load_spec_dict, load_spec_text

__all__ = [
    "__version__",
    "InvalidParam",
    "InvalidTree",
    "InvalidWeights",
    "NoGeneralizedRoot",
    "NotFredholm",
    "NotLeftInvertible",
    "OnEssentialSpectrum",
    "OutsideDelta",
    "OutsideDisc",
    "ShiftTreeError",
    "SpecParseError",
    "UnknownBuiltin",
    "UnknownVertex",
    "BUILTIN_NAMES",
    "Core",
    "DirectedTree",
    "Ray",
    "builtin",
    "WeightSequence",
    "SparseVector",
    "WeightedShift",
    "apply",
    "apply_adjoint",
    "apply_adjoint_power",
    "apply_power",
    "cauchy_dual",
    "column_norm",
    "spectral_radius",
    "basis_polynomial",
    "coefficient_block",
    "cokernel_basis",
    "kernel_partial_sum",
    "model_coefficients",
    "radius_of_convergence",
    "reproducing_check",
    "ap_spectrum_annuli",
    "chi_ker_check",
    "cowen_douglas_field",
    "dim_ker_adjoint_power",
    "fredholm_index",
    "quotient_dims",
    "unilateral_decomposition",
    "RootlessShift",
    "decompose",
    "generalized_root",
    "index_relation",
    "self_commutator_blocks",
    "load_spec",
    "load_spec_dict",
    "load_spec_text",
]
