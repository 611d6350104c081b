"""Game primitives: consequence models, payoffs, mixtures, beliefs, GameSpec."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import NonFiniteKL, SchemaError
from .grids import ActionGrid, ParamGrid

PROB_TOL = 1e-12


# ---------------------------------------------------------------------------
# cost functions

class QuadraticCost:
    """c(a) = coef * a^2 / 2, so marginal cost c'(a) = coef * a."""

    def __init__(self, coef: float = 1.0):
        if coef <= 0:
            raise ValueError("quadratic cost coefficient must be positive")
        self.coef = float(coef)

    def cost(self, a):
        return 0.5 * self.coef * np.square(a)

    def marginal(self, a):
        return self.coef * np.asarray(a, dtype=float)

    def marginal_inverse(self, u):
        u = np.asarray(u, dtype=float)
        return np.maximum(u, 0.0) / self.coef

    def to_dict(self):
        return {"kind": "quadratic", "coef": self.coef}


class TabulatedCost:
    """Marginal cost tabulated on knots, monotone (PCHIP) interpolation.

    The marginal curve is shifted so c'(0) = 0 and checked strictly
    increasing on the knots; c is its antiderivative with c(0) = 0.
    """

    def __init__(self, knots: np.ndarray, marginal_values: np.ndarray):
        knots = np.asarray(knots, dtype=float)
        mv = np.asarray(marginal_values, dtype=float)
        if knots[0] != 0.0:
            raise ValueError("marginal-cost knots must start at a = 0")
        if not np.all(np.diff(mv) > 0):
            raise ValueError("tabulated marginal cost must be strictly increasing")
        mv = mv - mv[0]
        self.knots = knots
        self.marginal_values = mv
        self._mc = PchipInterpolator(knots, mv, extrapolate=False)
        self._c = self._mc.antiderivative()

    def cost(self, a):
        return self._c(a)

    def marginal(self, a):
        return self._mc(a)

    def marginal_inverse(self, u):
        scal = np.isscalar(u)
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lo, hi = self.knots[0], self.knots[-1]
        out = np.empty_like(u)
        for j, uj in enumerate(u):
            if uj <= 0.0:
                out[j] = 0.0
            elif uj >= self.marginal_values[-1]:
                out[j] = hi
            else:
                out[j] = brentq(lambda a: float(self._mc(a)) - uj, lo, hi, xtol=1e-14)
        return float(out[0]) if scal else out

    def to_dict(self):
        return {
            "kind": "tabulated",
            "knots": self.knots.tolist(),
            "marginal_values": self.marginal_values.tolist(),
        }


CostFn = QuadraticCost | TabulatedCost


def cost_from_dict(d) -> QuadraticCost | TabulatedCost:
    try:
        if d["kind"] == "quadratic":
            return QuadraticCost(d["coef"])
        if d["kind"] == "tabulated":
            return TabulatedCost(np.asarray(d["knots"]),
                                 np.asarray(d["marginal_values"]))
    except KeyError as e:
        raise SchemaError(f"cost: missing required field {e.args[0]!r}") from None
    raise SchemaError(f"unknown cost kind {d['kind']!r}")


# ---------------------------------------------------------------------------
# consequence models

@dataclass(frozen=True)
class GaussianLinear:
    """Unit-variance Gaussian outcome; mean affine in the parameter.

    mean(theta, profile) = base[profile] + slope[profile] * theta.
    The true kernel uses slope == 0 (mean fixed at base).
    """

    base: np.ndarray
    slope: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        slope = np.broadcast_to(np.asarray(self.slope, dtype=float), base.shape).copy()
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "slope", slope)

    @property
    def n_profiles(self) -> int:
        return self.base.size

    def mean(self, theta, profiles=None):
        if profiles is None:
            return self.base + self.slope * theta
        profiles = np.asarray(profiles)
        return self.base[profiles] + self.slope[profiles] * theta

    def logpdf(self, y, theta, profile):
        m = self.base[profile] + self.slope[profile] * theta
        return -0.5 * np.square(y - m) - 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class TabularFinite:
    """Finite outcome list with a probability row per action profile.

    ``probs`` has shape (n_profiles, n_y) for a true kernel and
    (n_theta, n_profiles, n_y) for a parameterized family.
    """

    outcomes: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape[-1] != outcomes.size:
            raise ValueError("probability rows must match the outcome list")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        sums = probs.sum(axis=-1)
        if not np.allclose(sums, 1.0, atol=PROB_TOL, rtol=0.0):
            raise ValueError("probability rows must sum to 1 within 1e-12")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "probs", probs)

    @property
    def is_family(self) -> bool:
        return self.probs.ndim == 3

    @property
    def n_profiles(self) -> int:
        return self.probs.shape[-2]

    def row(self, profile, theta_idx=None):
        if self.is_family:
            return self.probs[theta_idx, profile]
        return self.probs[profile]


ConsequenceModel = GaussianLinear | TabularFinite


# ---------------------------------------------------------------------------
# payoffs

@dataclass(frozen=True)
class LinearPayoff:
    """pi(a, y) = y - c(a)."""

    cost: QuadraticCost | TabulatedCost

    def value(self, a_own, y):
        return np.asarray(y, dtype=float) - self.cost.cost(a_own)


@dataclass(frozen=True)
class TabularPayoff:
    """Payoff table indexed by (own action index, outcome index)."""

    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "table", np.asarray(self.table, dtype=float))


PayoffFn = LinearPayoff | TabularPayoff


# ---------------------------------------------------------------------------
# mixtures and beliefs

@dataclass(frozen=True)
class ProfileMixture:
    """Probability weights over a finite support of flat profile indices."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if support.size != weights.size or support.size == 0:
            raise ValueError("support and weights must be nonempty and equal-length")
        if np.unique(support).size != support.size:
            raise ValueError("support indices must be distinct")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > PROB_TOL:
            raise ValueError("weights must sum to 1 within 1e-12")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point_mass(cls, profile: int) -> "ProfileMixture":
        return cls(np.array([profile]), np.array([1.0]))

    @classmethod
    def from_dense(cls, dense: np.ndarray, tol: float = 0.0) -> "ProfileMixture":
        dense = np.asarray(dense, dtype=float)
        support = np.flatnonzero(dense > tol)
        w = dense[support]
        return cls(support, w / w.sum())

    def dense(self, n_profiles: int) -> np.ndarray:
        out = np.zeros(n_profiles)
        out[self.support] = self.weights
        return out

    def opponent_marginal(self, actions: ActionGrid, player: int) -> "OpponentMarginal":
        """Pushforward onto the opponents' coordinates."""
        agg: dict[int, float] = {}
        for p, w in zip(self.support, self.weights):
            _, opp = actions.split_profile(int(p), player)
            agg[opp] = agg.get(opp, 0.0) + float(w)
        keys = np.array(sorted(agg), dtype=np.int64)
        return OpponentMarginal(keys, np.array([agg[k] for k in keys]))

    def own_marginal(self, actions: ActionGrid, player: int) -> np.ndarray:
        """Dense marginal over the player's own action grid."""
        out = np.zeros(actions.shape[player])
        for p, w in zip(self.support, self.weights):
            own, _ = actions.split_profile(int(p), player)
            out[own] += w
        return out


@dataclass(frozen=True)
class OpponentMarginal:
    """Weights over flat opponent-profile indices for one player."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64).ravel()
        weights = np.asarray(self.weights, dtype=float).ravel()
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("marginal weights must sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point_mass(cls, opp_flat: int) -> "OpponentMarginal":
        return cls(np.array([opp_flat]), np.array([1.0]))


@dataclass(frozen=True)
class ParamBelief:
    """Probability weights over one player's parameter grid."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if np.any(w < 0):
            raise ValueError("belief weights must be nonnegative")
        if abs(w.sum() - 1.0) > PROB_TOL:
            raise ValueError("belief weights must sum to 1 within 1e-12")
        object.__setattr__(self, "weights", w)

    @classmethod
    def point_mass(cls, n: int, idx: int) -> "ParamBelief":
        w = np.zeros(n)
        w[idx] = 1.0
        return cls(w)

    @classmethod
    def uniform_over(cls, n: int, idxs) -> "ParamBelief":
        w = np.zeros(n)
        w[np.asarray(idxs, dtype=np.int64)] = 1.0 / len(idxs)
        return cls(w)


# ---------------------------------------------------------------------------
# structured Gaussian-effort metadata

SOLO = "solo"
MANAGER = "manager"
WORKER = "worker"


@dataclass(frozen=True)
class EffortRole:
    """One player's role in the Gaussian effort family.

    The family mean is theta * (alpha + a_i * g_i(a_-i)) and the true mean
    theta_star * (alpha_star + a_i * g_i(a_-i)), where g_i is 1 (solo), an
    indicator that two designated players' actions differ by less than the
    threshold (manager), or a designated leader's action (worker).
    """

    kind: str
    pair: tuple[int, int] | None = None
    threshold: float | None = None
    leader: int | None = None

    def __post_init__(self):
        if self.kind not in (SOLO, MANAGER, WORKER):
            raise ValueError(f"unknown role kind {self.kind!r}")
        if self.kind == MANAGER and (self.pair is None or self.threshold is None):
            raise ValueError("manager role needs a worker pair and a threshold")
        if self.kind == WORKER and self.leader is None:
            raise ValueError("worker role needs a leader")


@dataclass(frozen=True)
class EffortStructure:
    """Shared coefficients of a Gaussian effort-family game."""

    theta_star: float
    alpha_star: float
    alpha: float
    roles: tuple[EffortRole, ...]

    def feature(self, actions: ActionGrid, player: int, profile_values: np.ndarray) -> np.ndarray:
        """g_i evaluated on (n, n_players) profile-value rows."""
        role = self.roles[player]
        if role.kind == SOLO:
            return np.ones(profile_values.shape[0])
        if role.kind == MANAGER:
            j, k = role.pair
            return (np.abs(profile_values[:, j] - profile_values[:, k])
                    < role.threshold).astype(float)
        return profile_values[:, role.leader]


# ---------------------------------------------------------------------------
# game spec

@dataclass
class GameSpec:
    """Full description of a finite-grid game."""

    players: list[str]
    actions: ActionGrid
    params: list[ParamGrid]
    true_models: list[ConsequenceModel]
    family_models: list[ConsequenceModel]
    payoffs: list[PayoffFn]
    structure: EffortStructure | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.players)
        for name, seq in (("params", self.params), ("true_models", self.true_models),
                          ("family_models", self.family_models), ("payoffs", self.payoffs)):
            if len(seq) != n:
                raise ValueError(f"{name} must have one entry per player")
        if self.actions.n_players != n:
            raise ValueError("action grid player count mismatch")
        self._check_positivity()

    @property
    def n_players(self) -> int:
        return len(self.players)

    def _check_positivity(self):
        # Grid analogue of the likelihood-ratio/positivity requirement: the
        # family must assign positive probability wherever the truth does.
        for i in range(self.n_players):
            t, f = self.true_models[i], self.family_models[i]
            if isinstance(t, TabularFinite):
                if not isinstance(f, TabularFinite):
                    raise ValueError("true/family models must share an outcome space")
                bad = (t.probs[None, ...] > 0) & (f.probs <= 0)
                if np.any(bad):
                    raise NonFiniteKL(
                        f"player {self.players[i]}: family assigns zero probability "
                        "to a positive-probability outcome")

    def n_theta(self, player: int) -> int:
        return self.params[player].n

    def expected_payoff(self, player: int, theta_idx: int, profiles: np.ndarray) -> np.ndarray:
        """E[pi | theta, profile] for an array of flat profile indices."""
        profiles = np.asarray(profiles, dtype=np.int64)
        fam = self.family_models[player]
        pay = self.payoffs[player]
        own_idx = self.actions.all_profile_indices()[profiles, player]
        if isinstance(fam, GaussianLinear):
            theta = self.params[player].points[theta_idx]
            mean = fam.base[profiles] + fam.slope[profiles] * theta
            if not isinstance(pay, LinearPayoff):
                raise ValueError("Gaussian outcomes require a linear payoff")
            a_own = self.actions.per_player[player][own_idx]
            return mean - pay.cost.cost(a_own)
        rows = fam.probs[theta_idx, profiles]  # (n, n_y)
        if isinstance(pay, TabularPayoff):
            return np.einsum("ny,ny->n", rows, pay.table[own_idx])
        a_own = self.actions.per_player[player][own_idx]
        vals = rows @ fam.outcomes
        return vals - pay.cost.cost(a_own)

    def payoff_value(self, player: int, a_own: float, own_idx: int, y: float) -> float:
        pay = self.payoffs[player]
        if isinstance(pay, LinearPayoff):
            return float(y - pay.cost.cost(a_own))
        y_idx = int(np.argmin(np.abs(self.true_models[player].outcomes - y)))
        return float(pay.table[own_idx, y_idx])

    def is_pointwise_identified(self, tol: float = 1e-9) -> bool:
        """True when every player's single-profile KL minimizer is the same
        unique grid point for all profiles, which makes best-fit beliefs
        independent of the conjectured action distribution."""
        key = ("pointwise_identified", tol)
        if key not in self._cache:
            if self.structure is not None:
                # Correct specification collapses every profile minimizer to
                # theta_star; misspecification makes it profile-dependent.
                s = self.structure
                ok = s.alpha == s.alpha_star
                for g in self.params:
                    band = np.flatnonzero(np.abs(g.points - s.theta_star)
                                          <= np.abs(g.points - s.theta_star).min() + tol)
                    ok = ok and band.size == 1
                self._cache[key] = ok
                return self._cache[key]
            from .core import kl_profile_matrix
            ok = True
            for i in range(self.n_players):
                K = kl_profile_matrix(self, i)  # (n_theta, n_profiles)
                mins = K.min(axis=0)
                band = K <= mins[None, :] + tol
                common = band.all(axis=1)
                ok = ok and common.sum() == 1 and np.all(band.sum(axis=0) == 1)
                if not ok:
                    break
            self._cache[key] = ok
        return self._cache[key]

    def pointwise_minimizer(self, player: int, tol: float = 1e-9) -> int:
        if self.structure is not None and self.structure.alpha == self.structure.alpha_star:
            return self.params[player].nearest_index(self.structure.theta_star)
        from .core import kl_profile_matrix
        K = kl_profile_matrix(self, player)
        mins = K.min(axis=0)
        band = K <= mins[None, :] + tol
        common = np.flatnonzero(band.all(axis=1))
        if common.size != 1:
            raise ValueError("no common unique profile-wise KL minimizer")
        return int(common[0])
