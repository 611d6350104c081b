"""Myopic Bayesian learning dynamic and containment checks.

Each period every player best-responds (lowest-index tie-break, or a logit
sample when payoff shocks are on) to their current posterior over the
parameter grid and a smoothed empirical forecast of opponents' play, then
observes an outcome drawn from the true kernel and updates both.

Effort-family games run through the compiled kernel in ``_kernels``; other
specs use the generic interpreted loop below.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .core import best_response_set
from .errors import DegenerateLikelihood
from .models import (GameSpec, GaussianLinear, OpponentMarginal, ParamBelief,
                     ProfileMixture)
from .solver import LogitPerturbation, SurvivorSet, logit_response


@dataclass
class RunConfig:
    horizon: int
    reps: int = 1
    seed: int = 0
    alpha0: float = 1.0
    thin_stride: int = 0
    window_frac: float = 0.2
    eps: float = 0.02
    tie_break: str = "lowest"

    def __post_init__(self):
        if self.horizon < 1 or self.reps < 1:
            raise ValueError("horizon and reps must be >= 1")
        if not 0.0 < self.window_frac < 1.0:
            raise ValueError("window_frac must be in (0, 1)")
        if self.eps < 0 or self.alpha0 <= 0:
            raise ValueError("eps must be >= 0 and alpha0 > 0")
        if self.tie_break != "lowest":
            raise ValueError("only lowest-index tie-breaking is supported")


@dataclass
class ForecastState:
    """Smoothed empirical forecast over one player's opponent cells."""

    prior: np.ndarray
    alpha0: float
    counts: np.ndarray
    t: int = 1

    @classmethod
    def uniform(cls, n_cells: int, alpha0: float) -> "ForecastState":
        return cls(np.full(n_cells, 1.0 / n_cells), alpha0, np.zeros(n_cells), 1)

    def weights(self) -> np.ndarray:
        seen = self.t - 1
        lam = self.alpha0 / (self.alpha0 + seen)
        emp = self.counts / seen if seen else self.prior
        return lam * self.prior + (1.0 - lam) * emp


def forecast_update(state: ForecastState, observed_cell: int) -> ForecastState:
    counts = state.counts.copy()
    counts[observed_cell] += 1.0
    return replace(state, counts=counts, t=state.t + 1)


@dataclass
class PosteriorState:
    """Log-weights over one player's parameter grid."""

    log_weights: np.ndarray

    @classmethod
    def uniform(cls, n: int) -> "PosteriorState":
        return cls(np.zeros(n))

    def weights(self) -> np.ndarray:
        z = np.exp(self.log_weights - self.log_weights.max())
        return z / z.sum()


def posterior_update(state: PosteriorState, spec: GameSpec, player: int,
                     profile: int, outcome: float) -> PosteriorState:
    fam = spec.family_models[player]
    if isinstance(fam, GaussianLinear):
        mean = fam.base[profile] + fam.slope[profile] * spec.params[player].points
        logp = -0.5 * np.square(outcome - mean)
    else:
        y_idx = int(np.argmin(np.abs(fam.outcomes - outcome)))
        with np.errstate(divide="ignore"):
            logp = np.log(fam.probs[:, profile, y_idx])
    lw = state.log_weights + logp
    mx = lw.max()
    if not np.isfinite(mx):
        raise DegenerateLikelihood("all parameter likelihoods vanished")
    return PosteriorState(lw - mx)


@dataclass
class LearningTrace:
    """Per-period record of one replication."""

    actions: np.ndarray       # (T, P) action grid indices
    outcomes: np.ndarray      # (T, P)
    post_mean: np.ndarray     # (T, P) posterior mean parameter
    forecast_stat: np.ndarray | None = None   # (T, P) scalar forecast statistic
    posteriors: np.ndarray | None = None      # (T, P, n_theta) when recorded

    @property
    def horizon(self) -> int:
        return self.actions.shape[0]

    def profile_indices(self, spec: GameSpec) -> np.ndarray:
        return np.ravel_multi_index(tuple(self.actions.T), spec.actions.shape)

    def empirical(self, spec: GameSpec) -> np.ndarray:
        """sigma_T: visit counts over the profile grid divided by T."""
        dense = np.bincount(self.profile_indices(spec),
                            minlength=spec.actions.n_profiles)
        return dense / self.horizon


def _player_rng(cfg: RunConfig, player: int, rep: int, tag: int = 0):
    return np.random.default_rng(
        np.random.SeedSequence([cfg.seed, player, rep, tag]))


def _prior_stat(spec: GameSpec, player: int) -> float:
    role = spec.structure.roles[player]
    grids = spec.actions.per_player
    if role.kind == "manager":
        j, kk = role.pair
        pairs = np.abs(grids[j][:, None] - grids[kk][None, :]) < role.threshold
        return float(pairs.mean())
    if role.kind == "worker":
        return float(grids[role.leader].mean())
    return 1.0


def _kernel_episode(spec: GameSpec, cfg: RunConfig, rep: int,
                    perturb: LogitPerturbation | None,
                    forced: np.ndarray | None) -> LearningTrace:
    s = spec.structure
    grid = spec.actions.per_player[0]
    for g in spec.actions.per_player[1:]:
        if not np.array_equal(g, grid):
            raise ValueError("kernel path requires a shared action grid")
    theta = spec.params[0].points
    P = spec.n_players
    T = cfg.horizon
    cost_vals = np.stack([spec.payoffs[i].cost.cost(grid) for i in range(P)])
    role_kind = np.zeros(P, np.int64)
    role_p1 = np.zeros(P, np.int64)
    role_p2 = np.zeros(P, np.int64)
    threshold = 0.0
    for i, role in enumerate(s.roles):
        if role.kind == "manager":
            role_kind[i] = 1
            role_p1[i], role_p2[i] = role.pair
            threshold = float(role.threshold)
        elif role.kind == "worker":
            role_kind[i] = 2
            role_p1[i] = role.leader
    prior_stat = np.array([_prior_stat(spec, i) for i in range(P)])
    noise = np.column_stack([_player_rng(cfg, i, rep).standard_normal(T)
                             for i in range(P)])
    unif = np.column_stack([_player_rng(cfg, i, rep, 1).random(T)
                            for i in range(P)])
    if forced is None:
        forced = np.full((T, P), -1, np.int64)
    actions = np.zeros((T, P), np.int64)
    outcomes = np.zeros((T, P))
    post_mean = np.zeros((T, P))
    stat = np.zeros((T, P))
    _kernels.effort_episode(
        grid, cost_vals, theta, float(s.alpha), float(s.theta_star),
        float(s.alpha_star), role_kind, role_p1, role_p2, threshold,
        np.full(P, cfg.alpha0), prior_stat, noise, unif,
        perturb.scale if perturb is not None else -1.0, forced,
        actions, outcomes, post_mean, stat)
    return LearningTrace(actions, outcomes, post_mean, forecast_stat=stat)


def _generic_episode(spec: GameSpec, cfg: RunConfig, rep: int,
                     perturb: LogitPerturbation | None,
                     forced: np.ndarray | None,
                     record_posteriors: bool) -> LearningTrace:
    actions_grid = spec.actions
    P = spec.n_players
    T = cfg.horizon
    posts = [PosteriorState.uniform(spec.n_theta(i)) for i in range(P)]
    fores = [ForecastState.uniform(actions_grid.n_opponent_profiles(i), cfg.alpha0)
             for i in range(P)]
    rngs = [_player_rng(cfg, i, rep) for i in range(P)]
    urngs = [_player_rng(cfg, i, rep, 1) for i in range(P)]
    actions = np.zeros((T, P), np.int64)
    outcomes = np.zeros((T, P))
    post_mean = np.zeros((T, P))
    posteriors = np.zeros((T, P, spec.n_theta(0))) if record_posteriors else None
    opp_cells = [np.arange(actions_grid.n_opponent_profiles(i)) for i in range(P)]
    for t in range(T):
        chosen = np.zeros(P, np.int64)
        for i in range(P):
            belief = ParamBelief(posts[i].weights())
            opp = OpponentMarginal(opp_cells[i], fores[i].weights())
            if forced is not None and forced[t, i] >= 0:
                chosen[i] = forced[t, i]
            elif perturb is not None:
                probs = logit_response(spec, i, belief, opp, perturb)
                draw = int(np.searchsorted(np.cumsum(probs), urngs[i].random()))
                chosen[i] = min(draw, probs.size - 1)
            else:
                chosen[i] = int(best_response_set(spec, i, belief, opp)[0])
            post_mean[t, i] = float(belief.weights @ spec.params[i].points)
            if record_posteriors:
                posteriors[t, i] = belief.weights
        flat = actions_grid.ravel(chosen)
        actions[t] = chosen
        for i in range(P):
            true = spec.true_models[i]
            if isinstance(true, GaussianLinear):
                y = float(true.base[flat] + rngs[i].standard_normal())
            else:
                row = true.row(flat)
                y_idx = int(np.searchsorted(np.cumsum(row), rngs[i].random()))
                y = float(true.outcomes[min(y_idx, row.size - 1)])
            outcomes[t, i] = y
            posts[i] = posterior_update(posts[i], spec, i, flat, y)
            _, opp_flat = actions_grid.split_profile(flat, i)
            fores[i] = forecast_update(fores[i], opp_flat)
    return LearningTrace(actions, outcomes, post_mean, posteriors=posteriors)


def run_episode(spec: GameSpec, cfg: RunConfig, rep: int = 0,
                perturb: LogitPerturbation | None = None,
                forced: np.ndarray | None = None,
                record_posteriors: bool = False) -> LearningTrace:
    """One replication; deterministic given (cfg.seed, rep)."""
    if spec.structure is not None and not record_posteriors:
        return _kernel_episode(spec, cfg, rep, perturb, forced)
    return _generic_episode(spec, cfg, rep, perturb, forced, record_posteriors)


def _worker_cap() -> int:
    env = os.environ.get("BNLAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def run_many(spec: GameSpec, cfg: RunConfig,
             perturb: LogitPerturbation | None = None) -> list[LearningTrace]:
    """All replications, concurrently; output order is by replication index
    so results do not depend on the worker count."""
    workers = min(_worker_cap(), cfg.reps)
    if workers == 1:
        return [run_episode(spec, cfg, rep, perturb) for rep in range(cfg.reps)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_episode, spec, cfg, rep, perturb)
                   for rep in range(cfg.reps)]
        return [f.result() for f in futures]


def limit_points(trace: LearningTrace, cfg: RunConfig, spec: GameSpec) -> np.ndarray:
    """Profiles recurring in the trailing window (finite-horizon stand-in for
    the limit points of the play path)."""
    if trace.horizon < 10:
        raise ValueError("trace too short for limit detection")
    start = trace.horizon - max(1, int(np.ceil(cfg.window_frac * trace.horizon)))
    flat = trace.profile_indices(spec)[start:]
    return np.unique(flat)


@dataclass
class ContainmentReport:
    fractions: list[float]
    pass_rate: float
    per_trace: list[bool] = field(default_factory=list)


def containment_report(spec: GameSpec, traces: list[LearningTrace],
                       survivors: SurvivorSet, eps: float,
                       cfg: RunConfig) -> ContainmentReport:
    """Fraction of each trace's limit points within eps (sup norm on action
    values) of the survivor set, plus the aggregate all-points pass rate."""
    surv_vals = spec.actions.all_profile_values()[survivors.indices()]
    fractions = []
    per_trace = []
    for trace in traces:
        pts = limit_points(trace, cfg, spec)
        vals = spec.actions.all_profile_values()[pts]
        dists = np.abs(vals[:, None, :] - surv_vals[None, :, :]).max(axis=2).min(axis=1)
        ok = dists <= eps
        fractions.append(float(ok.mean()))
        per_trace.append(bool(ok.all()))
    rate = float(np.mean(per_trace)) if per_trace else 0.0
    return ContainmentReport(fractions, rate, per_trace)


def intended_strategies(spec: GameSpec, trace: LearningTrace, t: int,
                        perturb: LogitPerturbation) -> tuple[np.ndarray, ...]:
    """Logit choice profile implied by the recorded state at period t
    (effort-family traces only; utilities are linear in the posterior mean)."""
    if trace.forecast_stat is None:
        raise ValueError("needs a kernel trace with forecast statistics")
    s = spec.structure
    out = []
    for i in range(spec.n_players):
        grid = spec.actions.per_player[i]
        slope = trace.post_mean[t, i] * trace.forecast_stat[t, i]
        u = slope * grid - spec.payoffs[i].cost.cost(grid)
        z = np.exp((u - u.max()) / perturb.scale)
        out.append(z / z.sum())
    return tuple(out)


def posterior_decay_masses(spec: GameSpec, action_idx: tuple[int, ...],
                           cfg: RunConfig, band_tol: float = 1e-6) -> np.ndarray:
    """Posterior mass outside the best-fit band of the forced profile, per
    period and replication — the testable trace of the exponential-decay
    claim for misspecified Bayesian updating."""
    from .core import kl_minimizer_set
    flat = spec.actions.ravel(action_idx)
    sigma = ProfileMixture.point_mass(flat)
    masses = np.zeros((cfg.reps, cfg.horizon))
    forced = np.tile(np.asarray(action_idx, np.int64), (cfg.horizon, 1))
    for rep in range(cfg.reps):
        trace = run_episode(spec, cfg, rep, forced=forced, record_posteriors=True)
        for i in range(spec.n_players):
            band = kl_minimizer_set(spec, sigma, i, band_tol)
            outside = np.delete(np.arange(spec.n_theta(i)), band)
            masses[rep] += trace.posteriors[:, i, outside].sum(axis=1)
    return masses / spec.n_players
