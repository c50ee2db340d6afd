"""phlab: a numerical laboratory for pseudohermitian geometry.

Builds explicit strictly pseudoconvex CR manifolds (Heisenberg groups,
spheres, quadrics, weighted spheres, conformal rescalings), computes their
Tanaka-Webster connection, torsion and curvature by high-order finite
differences on exact symbolic jets, and verifies the classical structure
identities, curvature symmetry relations, conformal transformation laws,
geodesic-circle length expansions and immersion curvature relations at
machine-checkable tolerances.
"""

from .errors import (
    PhlabError, InvalidArgument, DomainError, DegenerateContact,
    NotStrictlyPseudoconvex, AxiomSystemDegenerate, InconsistentAxioms,
    TrajectoryLeftDomain, NotHorizontal, PreconditionFailed,
    NoisyExtrapolation,
)
from .models import (
    ChartModel, Domain, ImmersionMap,
    model_heisenberg, model_sphere, model_quadric, model_weighted_sphere,
    conformal_rescale, immersion_standard, model_from_id, list_models,
    decode_scalar_field,
)
from .frames import (
    FramePacket, frame_packet, reeb_field, levi_matrix,
    orthonormal_frame_func, anchored_cr_frame_func,
    lie_bracket, lie_derivative_form, is_infinitesimal_psh,
    heisenberg_symmetry_candidates,
)
from .connection import (
    ConnectionPacket, solve_connection, gamma_from_frame,
    structure_functions, frame_to_coordinate, coordinate_to_frame,
    coordinate_connection,
)
from .curvature import (
    CURVATURE_SCALE, SECTIONAL_RATIO, TOLERANCE_LADDER,
    CurvaturePacket, curvature_packet, curvature, sectional_H, sectional_K,
    ricci, rho, ricci_scalar, identity_suite, space_form_tensor,
    space_form_residual, defect_chain_check, appendix_chain_check,
    constant_h_value, sample_horizontal_unit, sample_orthonormal_pairs,
)
from .complexframe import (
    complex_basis, complexify_connection, scalar_complex_jets,
    conformal_connection_rows, conformal_curvature_rows, homothety_rows,
    conformal_check, conformal_coefficients_check, conformal_curvature_check,
    pluriharmonic_hessian_check,
)
from .geodesics import (
    CircleExperiment, exp_map, circle_family, circle_length, circle_lengths,
    extract_H_via_limit, reeb_plane_expansion_check, jacobi_integrate,
    geodesic_diagnostic_rows, jacobi_rows, DEFAULT_RADII,
)
from .immersions import (
    ImmersionPacket, second_fundamental_form, packet_rows, lemma1_check,
    gauss_equation_check, monotonicity_check, immersion_suite,
)
from .experiments import (
    EXPERIMENT_IDS, list_experiments, run_experiment, parallel_map,
    thread_count,
)
from .reporting import (
    ExperimentReport, build_report, apply_tolerance_overrides, report_json,
    write_report, rows_table,
)
from .jets import AnalyticField, NumericField, as_field, fd_first, jet_of

__version__ = "0.1.0"

__all__ = [
    "PhlabError", "InvalidArgument", "DomainError", "DegenerateContact",
    "NotStrictlyPseudoconvex", "AxiomSystemDegenerate", "InconsistentAxioms",
    "TrajectoryLeftDomain", "NotHorizontal", "PreconditionFailed",
    "NoisyExtrapolation",
    "ChartModel", "Domain", "ImmersionMap",
    "model_heisenberg", "model_sphere", "model_quadric",
    "model_weighted_sphere", "conformal_rescale", "immersion_standard",
    "model_from_id", "list_models", "decode_scalar_field",
    "FramePacket", "frame_packet", "reeb_field", "levi_matrix",
    "orthonormal_frame_func", "anchored_cr_frame_func",
    "lie_bracket", "lie_derivative_form", "is_infinitesimal_psh",
    "heisenberg_symmetry_candidates",
    "ConnectionPacket", "solve_connection", "gamma_from_frame",
    "structure_functions", "frame_to_coordinate", "coordinate_to_frame",
    "coordinate_connection",
    "CURVATURE_SCALE", "SECTIONAL_RATIO", "TOLERANCE_LADDER",
    "CurvaturePacket", "curvature_packet", "curvature", "sectional_H",
    "sectional_K", "ricci", "rho", "ricci_scalar", "identity_suite",
    "space_form_tensor", "space_form_residual", "defect_chain_check",
    "appendix_chain_check", "constant_h_value",
    "sample_horizontal_unit", "sample_orthonormal_pairs",
    "complex_basis", "complexify_connection", "scalar_complex_jets",
    "conformal_connection_rows", "conformal_curvature_rows", "homothety_rows",
    "conformal_check", "conformal_coefficients_check",
    "conformal_curvature_check", "pluriharmonic_hessian_check",
    "CircleExperiment", "exp_map", "circle_family", "circle_length",
    "circle_lengths", "extract_H_via_limit", "reeb_plane_expansion_check",
    "jacobi_integrate", "geodesic_diagnostic_rows", "jacobi_rows",
    "DEFAULT_RADII",
    "ImmersionPacket", "second_fundamental_form", "packet_rows",
    "lemma1_check", "gauss_equation_check", "monotonicity_check",
    "immersion_suite",
    "EXPERIMENT_IDS", "list_experiments", "run_experiment", "parallel_map",
    "thread_count",
    "ExperimentReport", "build_report", "apply_tolerance_overrides",
    "report_json", "write_report", "rows_table",
    "AnalyticField", "NumericField", "as_field", "fd_first", "jet_of",
    "__version__",
]
