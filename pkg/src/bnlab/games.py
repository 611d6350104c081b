"""Builders for concrete game specifications.

Two families are used throughout:

* linear-Gaussian effort games (single agent, or a three-player team with a
  manager and two symmetric workers), where output is linear in a scale
  parameter and agents may hold a wrong productivity constant, and
* finite tabular games with an explicit outcome kernel per profile.
"""

from __future__ import annotations

import numpy as np

from .grids import ActionGrid, ParamGrid, uniform_grid
from .models import (
    CostFn,
    EffortRole,
    EffortStructure,
    GameSpec,
    GaussianLinear,
    LinearPayoff,
    QuadraticCost,
    TabularFinite,
    TabularPayoff,
)


def make_effort_game(
    theta_star: float,
    alpha_star: float,
    alpha: float,
    cost: CostFn | None = None,
    action_max: float | None = None,
    n_actions: int = 201,
    theta_max: float | None = None,
    n_theta: int = 201,
) -> GameSpec:
    """Single-agent effort game.

    True output mean is theta_star * (alpha_star + a); the agent's model
    family has mean theta * (alpha + a).  The default action ceiling is the
    point where marginal cost reaches twice theta_star, which no admissible
    belief can justify exceeding.
    """
    if cost is None:
        cost = QuadraticCost(1.0)
    if action_max is None:
        action_max = cost.marginal_inverse(2.0 * theta_star)
    if theta_max is None:
        theta_max = 2.0 * theta_star
    actions = ActionGrid((uniform_grid(0.0, action_max, n_actions),))
    params = ParamGrid(uniform_grid(0.0, theta_max, n_theta))
    structure = EffortStructure(
        theta_star=theta_star,
        alpha_star=alpha_star,
        alpha=alpha,
        roles=(EffortRole("solo"),),
    )
    a = actions.per_player[0]
    true_model = GaussianLinear(base=theta_star * (alpha_star + a), slope=np.zeros_like(a))
    family = GaussianLinear(base=np.zeros_like(a), slope=alpha + a)
    return GameSpec(
        players=("agent",),
        actions=actions,
        params=(params,),
        true_models=(true_model,),
        family_models=(family,),
        payoffs=(LinearPayoff(cost),),
        structure=structure,
    )


def make_team_game(
    theta_star: float,
    alpha_star: float,
    alpha: float,
    threshold: float,
    costs: tuple[CostFn, CostFn, CostFn] | None = None,
    action_max: float | None = None,
    n_actions: int = 21,
    theta_max: float | None = None,
    n_theta: int = 201,
) -> GameSpec:
    """Manager-and-two-workers team game.

    Player 0 is the manager: their output carries the coordination indicator
    1{|a2 - a3| < threshold}.  Players 1 and 2 are workers: their output
    scales with the manager's action.  All three may share a wrong
    productivity constant alpha.
    """
    if costs is None:
        costs = (QuadraticCost(1.0),) * 3
    if action_max is None:
        action_max = max(c.marginal_inverse(2.0 * theta_star) for c in costs)
    if theta_max is None:
        theta_max = 2.0 * theta_star
    grid = uniform_grid(0.0, action_max, n_actions)
    actions = ActionGrid((grid, grid, grid))
    params = ParamGrid(uniform_grid(0.0, theta_max, n_theta))
    roles = (
        EffortRole("manager", pair=(1, 2), threshold=threshold),
        EffortRole("worker", leader=0),
        EffortRole("worker", leader=0),
    )
    structure = EffortStructure(theta_star, alpha_star, alpha, roles)
    profiles = actions.all_profile_values()
    true_models = []
    families = []
    for i in range(3):
        g = structure.feature(actions, i, profiles)
        true_models.append(
            GaussianLinear(base=theta_star * (alpha_star + profiles[:, i] * g), slope=np.zeros(len(g)))
        )
        families.append(GaussianLinear(base=np.zeros(len(g)), slope=alpha + profiles[:, i] * g))
    return GameSpec(
        players=("manager", "worker1", "worker2"),
        actions=actions,
        params=(params, params, params),
        true_models=tuple(true_models),
        family_models=tuple(families),
        payoffs=tuple(LinearPayoff(c) for c in costs),
        structure=structure,
    )


def make_tabular_game(
    action_counts: tuple[int, ...],
    payoff_tables: tuple[np.ndarray, ...],
    true_probs: tuple[np.ndarray, ...],
    family_probs: tuple[np.ndarray, ...],
    outcomes: tuple[np.ndarray, ...],
    n_theta: int | None = None,
) -> GameSpec:
    """Finite game with explicit per-profile outcome kernels.

    payoff_tables[i] has shape (n_own_i, n_outcomes_i); true_probs[i] is
    (n_profiles, n_outcomes_i); family_probs[i] is
    (n_theta, n_profiles, n_outcomes_i).
    """
    n_players = len(action_counts)
    actions = ActionGrid(tuple(np.arange(c, dtype=float) for c in action_counts))
    if n_theta is None:
        n_theta = family_probs[0].shape[0]
    params = ParamGrid(np.arange(n_theta, dtype=float))
    true_models = tuple(
        TabularFinite(outcomes=np.asarray(outcomes[i], dtype=float), probs=np.asarray(true_probs[i], dtype=float))
        for i in range(len(action_counts))
    )
    families = tuple(
        TabularFinite(outcomes=np.asarray(outcomes[i], dtype=float), probs=np.asarray(family_probs[i], dtype=float))
        for i in range(len(action_counts))
    )
    payoffs = tuple(TabularPayoff(np.asarray(t, dtype=float)) for t in payoff_tables)
    return GameSpec(
        players=tuple(f"p{i + 1}" for i in range(n_players)),
        actions=actions,
        params=(params,) * n_players,
        true_models=true_models,
        family_models=families,
        payoffs=payoffs,
    )


def make_payoff_game(payoffs: tuple[np.ndarray, ...]) -> GameSpec:
    """Correctly specified game built from payoff matrices alone.

    payoffs[i] is an n-dimensional array indexed by the action profile.  The
    observable outcome for player i is a deterministic tag of the realized
    profile, so the (single-point) model family is trivially correct and
    identified, and beliefs play no role beyond the opponents' mixture.
    """
    n_players = payoffs[0].ndim
    shape = payoffs[0].shape
    n_prof = int(np.prod(shape))
    actions = ActionGrid(tuple(np.arange(s, dtype=float) for s in shape))
    identity = np.eye(n_prof)
    profiles = actions.all_profile_indices()
    tables = []
    true_probs = []
    family_probs = []
    outs = []
    for i in range(n_players):
        n_own = shape[i]
        table = np.zeros((n_own, n_prof))
        for p in range(n_prof):
            own = profiles[p, i]
            # payoff if player i plays `own` while the opponents' part of the
            # tagged profile p is realized
            for b in range(n_own):
                q = list(profiles[p])
                q[i] = b
                table[b, p] = payoffs[i][tuple(q)]
        tables.append(table)
        true_probs.append(identity)
        family_probs.append(identity[None, :, :])
        outs.append(np.arange(n_prof, dtype=float))
    return make_tabular_game(tuple(shape), tuple(tables), tuple(true_probs), tuple(family_probs), tuple(outs))


def matching_pennies() -> GameSpec:
    u1 = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return make_payoff_game((u1, -u1))


def dominated_action_game() -> GameSpec:
    """2x2 game where the row player's second action is strictly dominated."""
    u1 = np.array([[3.0, 2.0], [1.0, 0.0]])
    u2 = np.array([[1.0, 0.0], [0.0, 1.0]])
    return make_payoff_game((u1, u2))


def random_payoff_game(rng: np.random.Generator, n_players: int = 2, max_actions: int = 4) -> GameSpec:
    """Random correctly specified game with integer payoffs in [-5, 5]."""
    shape = tuple(int(rng.integers(2, max_actions + 1)) for _ in range(n_players))
    payoffs = tuple(rng.integers(-5, 6, size=shape).astype(float) for _ in range(n_players))
    return make_payoff_game(payoffs)


def random_misspecified_game(
    rng: np.random.Generator,
    n_players: int = 2,
    max_actions: int = 3,
    n_outcomes: int = 3,
    n_theta: int = 4,
) -> GameSpec:
    """Random finite game whose model family need not contain the truth."""
    shape = tuple(int(rng.integers(2, max_actions + 1)) for _ in range(n_players))
    n_prof = int(np.prod(shape))
    tables = []
    true_probs = []
    family_probs = []
    outs = []
    for i in range(n_players):
        tables.append(np.round(rng.uniform(-3.0, 3.0, size=(shape[i], n_outcomes)), 3))
        true_probs.append(rng.dirichlet(np.ones(n_outcomes), size=n_prof))
        family_probs.append(rng.dirichlet(np.ones(n_outcomes), size=(n_theta, n_prof)))
        outs.append(np.arange(n_outcomes, dtype=float))
    return make_tabular_game(shape, tuple(tables), tuple(true_probs), tuple(family_probs), tuple(outs))
