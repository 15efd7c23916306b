"""Tube algebras of unitary fusion categories and exact sum-of-squares certificates."""

from .categories import BUILTINS, Category, builtin, load_category
from .cone import (Certificate, ConeSupport, GramDecomposition, SOSMap, laplacian_positivity_certificate,
                   order_unit_certificate, verify_certificate)
from .fusion_ring import FusionAlgebraElement, FusionData, LaplacianSpec, build_laplacian, validate_fusion_data
from .oracle import admissible_spectrum, build_gns, crosscheck_admissibility
from .sdp import SolverOptions, certify, extract_refutation, solve
from .skeleton import FSymbolTable, Morphism, pentagon_check, standard_solution
from .tube import TubeAlgebra, embed_fusion, tube_axiom_report

__version__ = "0.1.0"

__all__ = [
    "BUILTINS", "Category", "builtin", "load_category",
    "Certificate", "ConeSupport", "GramDecomposition", "SOSMap", "laplacian_positivity_certificate",
    "order_unit_certificate", "verify_certificate",
    "FusionAlgebraElement", "FusionData", "LaplacianSpec", "build_laplacian", "validate_fusion_data",
    "admissible_spectrum", "build_gns", "crosscheck_admissibility",
    "SolverOptions", "certify", "extract_refutation", "solve",
    "FSymbolTable", "Morphism", "pentagon_check", "standard_solution",
    "TubeAlgebra", "embed_fusion", "tube_axiom_report",
]
