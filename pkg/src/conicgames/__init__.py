"""Zero-sum games on bases of convex cones, solved as conic linear programs."""

from .cones import (ConeBlock, ConeProduct, Moment, Orthant, Psd, canonical_dual_interior, canonical_interior,
                    in_cone, in_dual_cone, in_dual_interior, in_interior, smat, svec)
from .diagnosis import (AlternativeVerdict, Diagnosis, alternatives, classify, optimal_set_meets_nullspace_I,
                        optimal_set_meets_nullspace_II, strict_feasibility_D, strict_feasibility_P)
from .exceptions import DimensionError, InfeasiblePointError, NotAStrategyError, SolverFailure
from .facial import solve_with_reduction
from .game import (ConicGame, LeveledSpec, best_response_I, best_response_II, normalize_leveled, payoff,
                   verify_equilibrium)
from .instances import example44, hankel, hankel_adjoint, matrix_game, polynomial_game, sdp_game
from .operators import LinOp, adjoint, adjoint_apply, apply, combine, make_E
from .programs import ConicPair, check_dual, check_primal, complementary_slackness, dual_pair, duality_gap
from .reduction import GameSolution, ReductionParams, build_pair, build_shifted_pair, solve_game
from .solver import SolverOptions, StandardProgram, solve, solve_pair, to_standard

__version__ = "0.1.0"
