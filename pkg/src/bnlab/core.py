"""KL best-fit sets and subjective-expected-utility best responses."""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteKL
from .models import (GameSpec, GaussianLinear, OpponentMarginal, ParamBelief,
                     ProfileMixture, TabularFinite)

DEFAULT_TOL = 1e-9


def kl_point(model_true, model_family, theta: float | int, profile: int) -> float:
    """KL divergence between the true kernel and the family member at one
    action profile.

    ``theta`` is a parameter value for Gaussian models and a grid index for
    tabular families.
    """
    if isinstance(model_true, GaussianLinear):
        m_true = model_true.base[profile]
        m_fam = model_family.base[profile] + model_family.slope[profile] * float(theta)
        return 0.5 * float(m_fam - m_true) ** 2
    q = model_true.row(profile)
    p = model_family.row(profile, int(theta))
    pos = q > 0
    if np.any(p[pos] <= 0):
        raise NonFiniteKL("family assigns zero probability to a supported outcome")
    return float(np.sum(q[pos] * np.log(q[pos] / p[pos])))


def kl_profile_matrix(spec: GameSpec, player: int,
                      profiles: np.ndarray | None = None) -> np.ndarray:
    """K^i(theta, a) as an (n_theta, n) array over the given flat profiles."""
    true = spec.true_models[player]
    fam = spec.family_models[player]
    if profiles is None:
        profiles = np.arange(true.n_profiles if isinstance(true, GaussianLinear)
                             else true.probs.shape[-2])
    profiles = np.asarray(profiles, dtype=np.int64)
    if isinstance(true, GaussianLinear):
        thetas = spec.params[player].points
        diff = (fam.base[profiles][None, :]
                + fam.slope[profiles][None, :] * thetas[:, None]
                - true.base[profiles][None, :])
        return 0.5 * diff ** 2
    q = true.probs[profiles]           # (n, n_y)
    p = fam.probs[:, profiles, :]      # (n_theta, n, n_y)
    pos = q > 0
    if np.any(p[:, pos] <= 0):
        raise NonFiniteKL("family assigns zero probability to a supported outcome")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pos[None, ...], q[None, ...] * np.log(q[None, ...] / p), 0.0)
    return terms.sum(axis=-1)


def expected_kl(spec: GameSpec, player: int, sigma: ProfileMixture) -> np.ndarray:
    """Expected KL over the mixture, per parameter grid point."""
    K = kl_profile_matrix(spec, player, sigma.support)
    return K @ sigma.weights


def kl_minimizer_set(spec: GameSpec, sigma: ProfileMixture, player: int,
                     tol: float = DEFAULT_TOL) -> np.ndarray:
    """Indices of parameter grid points within tol of the minimal expected KL."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ek = expected_kl(spec, player, sigma)
    return np.flatnonzero(ek <= ek.min() + tol)


def _joined_profiles(spec: GameSpec, player: int, own_indices: np.ndarray,
                     opp: OpponentMarginal) -> np.ndarray:
    """Flat profile indices for the (own x opponent-support) product."""
    actions = spec.actions
    n_own = own_indices.size
    m = opp.support.size
    if actions.n_players == 1:
        return np.repeat(own_indices, m).reshape(n_own, m)
    opp_shape = actions.opponent_shape(player)
    rest = np.array(np.unravel_index(opp.support, opp_shape))  # (n_players-1, m)
    full = np.empty((actions.n_players, n_own, m), dtype=np.int64)
    others = [j for j in range(actions.n_players) if j != player]
    for r, j in enumerate(others):
        full[j] = np.broadcast_to(rest[r][None, :], (n_own, m))
    full[player] = np.broadcast_to(own_indices[:, None], (n_own, m))
    return np.ravel_multi_index(tuple(full), actions.shape)


def utility_profile(spec: GameSpec, player: int, belief: ParamBelief,
                    opp: OpponentMarginal) -> np.ndarray:
    """Expected utility of every own action under belief and opponent marginal."""
    actions = spec.actions
    own_indices = np.arange(actions.shape[player])
    prof = _joined_profiles(spec, player, own_indices, opp)  # (n_own, m)
    flat = prof.ravel()
    acc = np.zeros(flat.size)
    for t_idx in np.flatnonzero(belief.weights):
        acc += belief.weights[t_idx] * spec.expected_payoff(player, int(t_idx), flat)
    return acc.reshape(prof.shape) @ opp.weights


def expected_utility(spec: GameSpec, player: int, action_idx: int,
                     belief: ParamBelief, opp: OpponentMarginal) -> float:
    """Expected utility of one own action (grid index)."""
    prof = _joined_profiles(spec, player, np.array([action_idx]), opp)
    flat = prof.ravel()
    total = 0.0
    for t_idx in np.flatnonzero(belief.weights):
        ep = spec.expected_payoff(player, int(t_idx), flat)
        total += belief.weights[t_idx] * float(ep @ opp.weights)
    return total


def best_response_set(spec: GameSpec, player: int, belief: ParamBelief,
                      opp: OpponentMarginal, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Own action indices within tol of the maximal expected utility, ascending."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    u = utility_profile(spec, player, belief, opp)
    return np.flatnonzero(u >= u.max() - tol)
