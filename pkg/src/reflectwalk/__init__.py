"""Exact and simulated stochastic-order checks for reflected random walks."""
from .core import (HALF, Boundary, DomainError, EnumerationTooLargeError, ExactProb, InvalidStateError,
                   Pmf, ReflectWalkError, StoppingTimeDist, UnsupportedKindError, WalkKind, WalkParams,
                   WalkState, exact_prob, parse_pmf, parse_stopping_time, serialize_pmf,
                   serialize_stopping_time)
from .kernels import (KernelReport, bernoulli_abs_up_prob, power_sum_ratio, u_walk_up_prob,
                      v_walk_up_prob, weighted_power_sum)
from .exact_engine import (brute_force_pmf, brute_force_stopping_time_dist, canonicalize_boundary,
                           decomposition_check, evolve_pmf, odd_horizon_survival_closed_form,
                           path_count_probability, path_set_counts, stopping_time_dist,
                           survival_curve, u_constrained_endpoint_prob, u_survival_prob)
from .order import (HypothesisViolatedError, MonotoneCoupling, OrderReport, build_monotone_coupling,
                    check_lemma2_hypothesis, dominates_pmf, lr_order_stopping_time,
                    quantile_coupling, survival_monotone_sweep)
from .gaussian import (brownian_functional_mc, brownian_order_mc, folded_kernel_density,
                       folded_kernel_mixture_form, joint_density_factorization_check,
                       kernel_normalization, lr_ratio_monotone_check, piecewise_linear_embed,
                       sample_abs_walk)
from .applications import RuinScenario, StartMode, ruin_duration_dist
from ._kernels import BACKEND

__version__ = "0.1.0"
