"""Exact computation of Davydov-Yetter cohomology for pseudo dg-tensor
structures on finite-dimensional dg-algebras, with a classical pointed
counterpart used as an independent check."""

from .classical import PointedFusionData, bar_oracle, build_classical, hdy_classical
from .complexes import CochainComplex, CohomologyReport, DoubleComplex, TotalSign, cohomology, totalize
from .dgcore import (DgAlgebra, Morphism, NFoldBimodule, TensorSign, identity_bimodule, tensor_bimodules,
                     tensor_over_algebra, validate_algebra, validate_bimodule)
from .dy import (Deformation, DYDoubleComplex, Orientation, Parenthesization, build_dy, build_parenthesization,
                 deformation_equivalent, first_order_deformations, hdy, verify_deformed_pentagon)
from .errors import DgdyError, PaddingError, ResourceCapError, ValidationError, WindowError
from .exactfield import GF, QQ, Matrix, field_from_name
from .fileformat import ParseError, parse_input, serialize
from .fixtures import make_cyclic_group, make_fixture, make_kronecker_p1, make_product_field, make_trivial
from .structure import Mode, PseudoTensorStructure, coherence_check, equivalence_check, functor_check

__version__ = "0.1.0"

__all__ = [
    "PointedFusionData", "bar_oracle", "build_classical", "hdy_classical",
    "CochainComplex", "CohomologyReport", "DoubleComplex", "TotalSign", "cohomology", "totalize",
    "DgAlgebra", "Morphism", "NFoldBimodule", "TensorSign", "identity_bimodule", "tensor_bimodules",
    "tensor_over_algebra", "validate_algebra", "validate_bimodule",
    "Deformation", "DYDoubleComplex", "Orientation", "Parenthesization", "build_dy", "build_parenthesization",
    "deformation_equivalent", "first_order_deformations", "hdy", "verify_deformed_pentagon",
    "DgdyError", "PaddingError", "ResourceCapError", "ValidationError", "WindowError",
    "GF", "QQ", "Matrix", "field_from_name", "ParseError", "parse_input", "serialize",
    "make_cyclic_group", "make_fixture", "make_kronecker_p1", "make_product_field", "make_trivial",
    "Mode", "PseudoTensorStructure", "coherence_check", "equivalence_check", "functor_check",
]
