"""Sampling-set selection and Bayesian interpolation of bandlimited graph signals."""

__version__ = "0.1.0"

from .graphs import (Graph, SpectralBasis, gen_erdos_renyi,
                     gen_preferential_attachment, gen_random_weighted, gft,
                     graph_from_json, graph_to_json, igft, select_band,
                     spectral_basis)
from .signals import (Prior, SignalDraw, draw_signal, make_prior,
                      prior_from_json, prior_to_json)
from .interp import (ErrorState, IllConditionedWarning, SamplingSet,
                     error_covariance, error_state, interpolate, mse,
                     optimal_interpolator)
from .bounds import (BoundsReport, SetSizeBound, bounds_report,
                     min_set_size_bound, structural_snrs, universal_bounds,
                     uniform_recovery_bound)
from .samplers import (GreedyResult, InfeasibleEnumerationError, Objective,
                       exhaustive_mse_table, exhaustive_optimal,
                       greedy_generic, greedy_mse, greedy_result_from_json,
                       greedy_result_to_json, leverage_scores,
                       logdet_objective, mse_objective, rank_leverage,
                       sample_leverage, sample_uniform)
from .alpha import (AlphaEstimate, GreedyGuarantee, alpha_exact,
                    alpha_lower_bound_general,
                    alpha_lower_bound_homeoscedastic, greedy_guarantee,
                    relative_suboptimality)
from .kpca import (GramModel, PolyKernel, ReducedProjector,
                   build_reduced_projector, gram_matrix, kpca_basis,
                   kpca_project, poly_kernel, projector_from_json,
                   projector_to_json, sub_project, two_circles)
from .experiments import (ExperimentConfig, ResultTable, config_from_dict,
                          run, summarize)
from .seeding import child_seed, make_rng
