"""Exact and asymptotic tools for the chromatic number of dense random graphs."""

__version__ = "0.1.0"

from .analytic import (HALF, AsymptoticRecord, DomainError, ModelParams, ScalePoint,
                       alpha0, asymptotic_record, chi_estimate, chi_estimate_derivative,
                       log_mu, phi_root)
from .graphs import (ColouringCertificate, Graph, SolverTimeout, bounded_chromatic_number,
                     chromatic_number, count_independent_sets, independence_number,
                     max_disjoint_a_sets, read_graph, sample_gnp, write_graph)
from .profile import exact_E, k_star_closed_form, k_t_exact, solve_k_star, solve_lagrange
from .coupling import (coupling_chain_experiment, exact_dist_check, grow_by_planting,
                       sample_planted, tv_upper_bound, var_Xa_exact)
from .predict import g0_prediction, theorem_bounds, variance_pipeline, zigzag_bounds

__all__ = [
    "HALF", "AsymptoticRecord", "DomainError", "ModelParams", "ScalePoint", "alpha0",
    "asymptotic_record", "chi_estimate", "chi_estimate_derivative", "log_mu", "phi_root",
    "ColouringCertificate", "Graph", "SolverTimeout", "bounded_chromatic_number",
    "chromatic_number", "count_independent_sets", "independence_number",
    "max_disjoint_a_sets", "read_graph", "sample_gnp", "write_graph",
    "exact_E", "k_star_closed_form", "k_t_exact", "solve_k_star", "solve_lagrange",
    "coupling_chain_experiment", "exact_dist_check", "grow_by_planting", "sample_planted",
    "tv_upper_bound", "var_Xa_exact",
    "g0_prediction", "theorem_bounds", "variance_pipeline", "zigzag_bounds",
]
