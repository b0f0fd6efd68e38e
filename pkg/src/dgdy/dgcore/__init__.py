"""Finite-dimensional dg algebras, n-fold bimodules, tensor products and Hom complexes."""

from .algebra import DgAlgebra, ValidationReport, Violation, ground_field_algebra, validate_algebra
from .bimodule import (
    RIGHT,
    NFoldBimodule,
    direct_sum,
    free_right_module,
    from_matrices,
    identity_bimodule,
    permuted_basis,
    right_ideal,
    span_submodule,
    validate_bimodule,
    zero_module,
)
from .hom import BimoduleMorphismSpace, Morphism, hom_complex
from .tensor import (
    Leaf,
    Node,
    TensorError,
    TensorSign,
    TreeEngine,
    TreeModule,
    idempotent_contract,
    leaves,
    tensor_bimodules,
    tensor_over_algebra,
)

__all__ = [
    "DgAlgebra", "ValidationReport", "Violation", "ground_field_algebra", "validate_algebra",
    "RIGHT", "NFoldBimodule", "direct_sum", "free_right_module", "from_matrices",
    "identity_bimodule", "permuted_basis", "right_ideal", "span_submodule",
    "validate_bimodule", "zero_module",
    "BimoduleMorphismSpace", "Morphism", "hom_complex",
    "Leaf", "Node", "TensorError", "TensorSign", "TreeEngine", "TreeModule",
    "idempotent_contract", "leaves", "tensor_bimodules", "tensor_over_algebra",
]
