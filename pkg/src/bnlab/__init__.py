"""Solver and simulator for games with misspecified Bayesian learners.

Compute the largest self-justified set of action profiles by iterated
elimination, simulate the myopic Bayesian learning dynamic, and check that
long-run play stays inside the computed set.
"""

from .analytic import (EffortExample, TeamExample, effort_rationalizable_interval,
                       effort_T, effort_theta_m, team_csi_profile, team_limits)
from .core import (best_response_set, expected_utility, kl_minimizer_set,
                   kl_point)
from .errors import (BnlabError, DegenerateLikelihood, EmptySurvivorSet,
                     NonFiniteKL, NotConverged, NotCorrectlySpecified,
                     SchemaError, UnidentifiedModel, UnknownExample)
from .games import (make_effort_game, make_tabular_game, make_team_game,
                    matching_pennies)
from .grids import ActionGrid, ParamGrid, uniform_grid
from .learning import (ForecastState, LearningTrace, PosteriorState, RunConfig,
                       containment_report, forecast_update, limit_points,
                       posterior_update, run_episode, run_many)
from .models import (GameSpec, GaussianLinear, ParamBelief, ProfileMixture,
                     QuadraticCost, TabulatedCost, TabularFinite)
from .search import DirichletSample, SimplexGrid, StructuredMoments
from .solver import (LogitPerturbation, SurvivorSet, Witness, bne_check,
                     gamma_apply, gamma_bp_apply, gamma_weak_apply,
                     iterate_to_fixed, phi_apply, phi_mixed_iterate,
                     phi_mixed_step, verify_witness)
from .specio import SpecDocument

__version__ = "0.1.0"
