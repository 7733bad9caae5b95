"""Exact and numerical verification suites for qc Fefferman structures.

The package splits into an exact layer (scalar/matrix arithmetic,
graded Lie algebras, Lie algebra cohomology, graded inclusions) and a
numerical layer (jets, chart calculus, model geometries), glued by the
report-generating CLI in :mod:`qcfeff.cli`.
"""

from .exact import ExactMatrix, Quaternion, kernel_basis, realify_C, realify_H
from .gradedlie import (
    GradedLieAlgebra,
    build_chain,
    build_co,
    build_cr,
    build_qc,
    centralizer_in_degree,
)
from .cohomology import (
    Cochain,
    bracket_tensor_id,
    codifferential,
    codifferential_minus,
    codifferential_wedge,
    differential,
    harmonic_space,
    hodge_check,
)
from .inclusions import (
    GradedInclusion,
    build_phi_cr_co,
    build_phi_qc_cr,
    check_structural_conditions,
    compose,
)
from .jets import Jet, jet_eval
from .charts import CurvatureData, MetricChart, VectorFieldOnChart

__all__ = [
    "Cochain",
    "CurvatureData",
    "ExactMatrix",
    "GradedInclusion",
    "GradedLieAlgebra",
    "Jet",
    "MetricChart",
    "Quaternion",
    "VectorFieldOnChart",
    "bracket_tensor_id",
    "build_chain",
    "build_co",
    "build_cr",
    "build_phi_cr_co",
    "build_phi_qc_cr",
    "build_qc",
    "centralizer_in_degree",
    "check_structural_conditions",
    "codifferential",
    "codifferential_minus",
    "codifferential_wedge",
    "compose",
    "differential",
    "harmonic_space",
    "hodge_check",
    "jet_eval",
    "kernel_basis",
    "realify_C",
    "realify_H",
]

__version__ = "0.1.0"
