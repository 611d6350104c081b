"""Rationalizability operators and their fixed-set iteration.

The elimination operator maps a profile set A to every profile justifiable
by some distribution over A: beliefs must sit on the KL-best-fit parameters
for that distribution and each player's action must best-respond to its
marginal.  Variants differ in who shares the witness distribution:

* gamma_apply      — one common witness for all players;
* gamma_weak_apply — one private witness per player;
* gamma_bp_apply   — private witnesses on the product hull (per-player
                     conjecture sets);
* phi_apply        — distribution-level membership (witness per support
                     profile);
* phi_mixed_step   — logit-perturbed map on mixed-strategy profiles.

The existential search over distributions runs through one of three routes:
an exact feasibility LP when best-fit beliefs are profile-independent, an
interval/moment iteration for the linear-Gaussian effort families, and a
finite mixture mesh otherwise.  Mesh results are certified subsets: every
survivor carries a replayable witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .core import (DEFAULT_TOL, best_response_set, kl_minimizer_set,
                   utility_profile)
from .errors import EmptySurvivorSet, NotConverged, UnidentifiedModel
from .models import (GameSpec, LinearPayoff, ParamBelief, ProfileMixture,
                     OpponentMarginal)
from .search import (DirichletSample, SigmaSearchPolicy, SimplexGrid,
                     StructuredMoments, candidate_weight_sets,
                     simplex_grid_weights)

MAX_BELIEF_MESH_SUPPORT = 4
BELIEF_MESH = 4
LP_MAX_PROFILES = 4096


# ---------------------------------------------------------------------------
# survivor sets and witnesses

@dataclass
class SurvivorSet:
    """Bitmask over the flat profile grid plus the round counter."""

    bits: np.ndarray
    k: int = 0

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=bool)

    @classmethod
    def full(cls, n_profiles: int) -> "SurvivorSet":
        return cls(np.ones(n_profiles, dtype=bool), 0)

    @classmethod
    def from_indices(cls, n_profiles: int, indices, k: int = 0) -> "SurvivorSet":
        bits = np.zeros(n_profiles, dtype=bool)
        bits[np.asarray(indices, dtype=np.int64)] = True
        return cls(bits, k)

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def same_bits(self, other: "SurvivorSet") -> bool:
        return np.array_equal(self.bits, other.bits)

    def issubset(self, other: "SurvivorSet") -> bool:
        return not np.any(self.bits & ~other.bits)

    def projections(self, actions) -> list[np.ndarray]:
        """Per-player boolean masks of actions appearing in some survivor."""
        nd = self.bits.reshape(actions.shape)
        out = []
        for i in range(actions.n_players):
            axes = tuple(j for j in range(actions.n_players) if j != i)
            out.append(nd.any(axis=axes) if axes else nd.copy())
        return out

    def product_hull(self, actions) -> "SurvivorSet":
        proj = self.projections(actions)
        nd = np.ones(actions.shape, dtype=bool)
        for i, p in enumerate(proj):
            shape = [1] * actions.n_players
            shape[i] = p.size
            nd &= p.reshape(shape)
        return SurvivorSet(nd.ravel(), self.k)

    def is_product(self, actions) -> bool:
        return self.same_bits(self.product_hull(actions))


@dataclass(frozen=True)
class Witness:
    """Replayable survival certificate: the witness mixture and one
    justifying belief per player."""

    sigma: ProfileMixture
    beliefs: tuple[ParamBelief, ...]


def verify_witness(spec: GameSpec, profile: int, witness: Witness,
                   tol: float = DEFAULT_TOL) -> bool:
    """Re-check a certificate through the model-core operations."""
    prof_idx = spec.actions.all_profile_indices()[profile]
    for i in range(spec.n_players):
        mins = kl_minimizer_set(spec, witness.sigma, i, tol)
        belief = witness.beliefs[i]
        if not set(np.flatnonzero(belief.weights)) <= set(mins.tolist()):
            return False
        opp = witness.sigma.opponent_marginal(spec.actions, i)
        if prof_idx[i] not in best_response_set(spec, i, belief, opp, tol):
            return False
    return True


@dataclass
class OperatorResult:
    survivors: SurvivorSet
    witnesses: dict[int, Witness] = field(default_factory=dict)


@dataclass
class SolveResult:
    survivors: SurvivorSet
    history: list[np.ndarray]
    converged: bool
    witnesses: dict[int, Witness]

    @property
    def rounds(self) -> int:
        return len(self.history) - 1


@dataclass(frozen=True)
class LogitPerturbation:
    """Additive extreme-value payoff shocks with the given scale."""

    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("logit scale must be positive")


# ---------------------------------------------------------------------------
# shared helpers

def _argmax_band(values: np.ndarray, tol: float) -> np.ndarray:
    return np.flatnonzero(values >= values.max() - tol)


def _opponent_index_table(spec: GameSpec, player: int) -> np.ndarray:
    """Flat opponent index for every flat profile index."""
    key = ("opp_table", player)
    if key not in spec._cache:
        actions = spec.actions
        if actions.n_players == 1:
            spec._cache[key] = np.zeros(actions.n_profiles, dtype=np.int64)
        else:
            idx = actions.all_profile_indices()
            rest = np.delete(idx, player, axis=1)
            spec._cache[key] = np.ravel_multi_index(
                tuple(rest.T), actions.opponent_shape(player))
    return spec._cache[key]


def _identified_eu_table(spec: GameSpec, player: int, tol: float) -> np.ndarray:
    """(n_own, n_opp) expected utilities under the unique best-fit belief."""
    key = ("eu_table", player)
    if key not in spec._cache:
        theta_idx = spec.pointwise_minimizer(player, tol)
        actions = spec.actions
        ep = spec.expected_payoff(player, theta_idx, np.arange(actions.n_profiles))
        nd = ep.reshape(actions.shape)
        nd = np.moveaxis(nd, player, 0)
        spec._cache[key] = nd.reshape(actions.shape[player], -1)
    return spec._cache[key]


def _candidate_beliefs(spec: GameSpec, player: int, mins: np.ndarray) -> list[ParamBelief]:
    """Belief search set over distributions on a minimizer set."""
    n = spec.n_theta(player)
    beliefs = [ParamBelief.point_mass(n, int(m)) for m in mins]
    if mins.size > 1:
        beliefs.append(ParamBelief.uniform_over(n, mins))
        if mins.size <= MAX_BELIEF_MESH_SUPPORT:
            for w in simplex_grid_weights(mins.size, BELIEF_MESH):
                full = np.zeros(n)
                full[mins] = w
                beliefs.append(ParamBelief(full))
    return beliefs


def _mixtures_from_policy(support: np.ndarray, policy: SigmaSearchPolicy) -> list[ProfileMixture]:
    W = candidate_weight_sets(support.size, policy)
    out = []
    seen = set()
    for w in W:
        nz = np.flatnonzero(w > 0)
        key = (tuple(support[nz].tolist()), tuple(np.round(w[nz], 12).tolist()))
        if key in seen:
            continue
        seen.add(key)
        out.append(ProfileMixture(support[nz], w[nz] / w[nz].sum()))
    return out


def _player_survival_for_mixture(spec: GameSpec, sigma: ProfileMixture, player: int,
                                 tol: float) -> tuple[np.ndarray, dict[int, ParamBelief]]:
    """Own actions justified by this mixture, with the belief used for each."""
    mins = kl_minimizer_set(spec, sigma, player, tol)
    opp = sigma.opponent_marginal(spec.actions, player)
    survivors: dict[int, ParamBelief] = {}
    for belief in _candidate_beliefs(spec, player, mins):
        for b in best_response_set(spec, player, belief, opp, tol):
            survivors.setdefault(int(b), belief)
    own = np.array(sorted(survivors), dtype=np.int64)
    return own, survivors


# ---------------------------------------------------------------------------
# LP route (profile-independent best-fit beliefs)

def _lp_feasible(spec: GameSpec, support: np.ndarray, rows: list[np.ndarray],
                 tol: float) -> np.ndarray | None:
    """Find sigma on the support simplex with all constraint rows ≤ tol/2."""
    if rows:
        A_ub = np.vstack(rows)
        b_ub = np.full(A_ub.shape[0], tol / 2.0)
    else:
        A_ub, b_ub = None, None
    res = linprog(c=np.zeros(support.size), A_ub=A_ub, b_ub=b_ub,
                  A_eq=np.ones((1, support.size)), b_eq=np.array([1.0]),
                  bounds=(0.0, None), method="highs")
    if not res.success:
        return None
    x = np.maximum(res.x, 0.0)
    return x / x.sum()


def _lp_constraint_rows(spec: GameSpec, player: int, own: int,
                        support: np.ndarray, tol: float) -> list[np.ndarray]:
    """Rows r with r @ sigma <= tol expressing that `own` best-responds."""
    eu = _identified_eu_table(spec, player, tol)
    opp_of = _opponent_index_table(spec, player)[support]
    base = eu[own, opp_of]
    rows = []
    for b in range(eu.shape[0]):
        if b == own:
            continue
        rows.append(eu[b, opp_of] - base)
    return rows


def _lp_gamma(spec: GameSpec, A: SurvivorSet, tol: float) -> OperatorResult:
    actions = spec.actions
    support = A.indices()
    prof_idx = actions.all_profile_indices()
    bits = np.zeros(actions.n_profiles, dtype=bool)
    witnesses: dict[int, Witness] = {}
    beliefs = tuple(
        ParamBelief.point_mass(spec.n_theta(i), spec.pointwise_minimizer(i, tol))
        for i in range(spec.n_players))
    for a in range(actions.n_profiles):
        rows = []
        for i in range(spec.n_players):
            rows.extend(_lp_constraint_rows(spec, i, int(prof_idx[a, i]), support, tol))
        x = _lp_feasible(spec, support, rows, tol)
        if x is None:
            continue
        bits[a] = True
        nz = np.flatnonzero(x > 1e-12)
        witnesses[a] = Witness(ProfileMixture(support[nz], x[nz] / x[nz].sum()), beliefs)
    return OperatorResult(SurvivorSet(bits, A.k + 1), witnesses)


def _lp_player_sets(spec: GameSpec, A: SurvivorSet, tol: float) -> list[np.ndarray]:
    """Per-player masks of own actions justifiable by a private mixture on A."""
    support = A.indices()
    out = []
    for i in range(spec.n_players):
        n_own = spec.actions.shape[i]
        mask = np.zeros(n_own, dtype=bool)
        for own in range(n_own):
            rows = _lp_constraint_rows(spec, i, own, support, tol)
            if _lp_feasible(spec, support, rows, tol) is not None:
                mask[own] = True
        out.append(mask)
    return out


# ---------------------------------------------------------------------------
# mesh route

def _mesh_gamma(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                tol: float) -> OperatorResult:
    actions = spec.actions
    bits_nd = np.zeros(actions.shape, dtype=bool)
    witnesses: dict[int, Witness] = {}
    for sigma in _mixtures_from_policy(A.indices(), policy):
        own_sets = []
        belief_maps = []
        ok = True
        for i in range(spec.n_players):
            own, bmap = _player_survival_for_mixture(spec, sigma, i, tol)
            if own.size == 0:
                ok = False
                break
            own_sets.append(own)
            belief_maps.append(bmap)
        if not ok:
            continue
        block = bits_nd[np.ix_(*own_sets)]
        if not block.all():
            new = np.argwhere(~block)
            for loc in new:
                idx = tuple(int(own_sets[i][loc[i]]) for i in range(spec.n_players))
                flat = actions.ravel(idx)
                witnesses[flat] = Witness(
                    sigma, tuple(belief_maps[i][idx[i]] for i in range(spec.n_players)))
            bits_nd[np.ix_(*own_sets)] = True
    return OperatorResult(SurvivorSet(bits_nd.ravel(), A.k + 1), witnesses)


def _mesh_player_sets(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                      tol: float) -> list[np.ndarray]:
    masks = [np.zeros(n, dtype=bool) for n in spec.actions.shape]
    for sigma in _mixtures_from_policy(A.indices(), policy):
        for i in range(spec.n_players):
            own, _ = _player_survival_for_mixture(spec, sigma, i, tol)
            masks[i][own] = True
    return masks


# ---------------------------------------------------------------------------
# structured route (linear-Gaussian effort families)

def _fit_single(structure, x):
    """Best-fit parameter against constant interaction term x."""
    return structure.theta_star * (structure.alpha_star + np.asarray(x, dtype=float)) \
        / (structure.alpha + np.asarray(x, dtype=float))


def _fit_moments(structure, u, v):
    """Best-fit parameter from the first two moments of the interaction term."""
    th, als, al = structure.theta_star, structure.alpha_star, structure.alpha
    return th * (al * als + (al + als) * u + v) / (al * al + 2.0 * al * u + v)


def _own_cost(spec: GameSpec, player: int):
    pay = spec.payoffs[player]
    if not isinstance(pay, LinearPayoff):
        raise ValueError("structured search requires linear payoffs")
    return pay.cost


def _slope_band_range(spec: GameSpec, player: int, s_lo: float, s_hi: float,
                      tol: float) -> np.ndarray:
    """Own-action mask: grid argmax of s*b - c(b) for some s in [s_lo, s_hi].

    The argmax index is nondecreasing in s, so the union over the interval is
    the contiguous range between the endpoint bands.
    """
    grid = spec.actions.per_player[player]
    c = _own_cost(spec, player).cost(grid)
    lo_band = _argmax_band(s_lo * grid - c, tol)
    hi_band = _argmax_band(s_hi * grid - c, tol)
    mask = np.zeros(grid.size, dtype=bool)
    mask[lo_band.min():hi_band.max() + 1] = True
    return mask


def _structured_solo(spec: GameSpec, A: SurvivorSet, tol: float) -> OperatorResult:
    s = spec.structure
    pts = spec.params[0].points
    grid = spec.actions.per_player[0]
    idx = A.indices()
    th = _fit_single(s, grid[idx])
    th_lo, th_hi = float(th.min()), float(th.max())
    p_lo = int(idx[np.argmin(th)])
    p_hi = int(idx[np.argmax(th)])
    # parameter grid points reachable as the expected-KL argmin for some
    # mixture: those whose nearest-point cell meets [th_lo, th_hi]
    mids = 0.5 * (pts[:-1] + pts[1:])
    cell_lo = np.concatenate(([-np.inf], mids))
    cell_hi = np.concatenate((mids, [np.inf]))
    reachable = np.flatnonzero((cell_lo <= th_hi) & (cell_hi >= th_lo))
    bits = np.zeros(spec.actions.n_profiles, dtype=bool)
    witnesses: dict[int, Witness] = {}
    all_prof = np.arange(spec.actions.n_profiles)
    for g in reachable:
        u = spec.expected_payoff(0, int(g), all_prof)
        band = _argmax_band(u, tol)
        fresh = band[~bits[band]]
        if fresh.size:
            target = 0.5 * (max(cell_lo[g], th_lo) + min(cell_hi[g], th_hi))
            sigma = _two_point_mixture(s, grid, p_lo, p_hi, target)
            belief = ParamBelief.point_mass(pts.size, int(g))
            for b in fresh:
                witnesses[int(b)] = Witness(sigma, (belief,))
        bits[band] = True
    return OperatorResult(SurvivorSet(bits, A.k + 1), witnesses)


def _two_point_mixture(structure, grid: np.ndarray, p_lo: int, p_hi: int,
                       target: float) -> ProfileMixture:
    """Mixture of two constant-play points whose best-fit parameter hits the
    target (weights solve the convex combination in the (alpha+a)^2-tilted
    coordinates)."""
    th_u = float(_fit_single(structure, grid[p_lo]))
    th_v = float(_fit_single(structure, grid[p_hi]))
    if p_lo == p_hi or abs(th_v - th_u) < 1e-15:
        return ProfileMixture.point_mass(p_lo)
    lam = np.clip((th_v - target) / (th_v - th_u), 0.0, 1.0)
    if lam == 1.0:
        return ProfileMixture.point_mass(p_lo)
    if lam == 0.0:
        return ProfileMixture.point_mass(p_hi)
    r2_u = (structure.alpha + grid[p_lo]) ** 2
    r2_v = (structure.alpha + grid[p_hi]) ** 2
    w = np.array([lam / r2_u, (1.0 - lam) / r2_v])
    return ProfileMixture(np.array([p_lo, p_hi]), w / w.sum())


def _structured_team(spec: GameSpec, A: SurvivorSet, tol: float,
                     coupled: bool) -> OperatorResult:
    """One interval/moment round of the manager-and-workers game.

    Per-player target ranges come from the extremes of single-profile
    best-fit parameters (exact over mixtures, since the fit is a ratio of
    two linear functionals).  With a shared witness (coupled=True) the two
    workers' responses are additionally confined to a window whose width is
    bounded through the two-moment fit formula, which is what eventually
    forces coordination when the threshold exceeds the limiting gap.
    """
    s = spec.structure
    actions = spec.actions
    if s.roles[0].kind != "manager":
        raise ValueError("structured team search expects the manager first")
    w1, w2 = s.roles[0].pair
    k = s.roles[0].threshold
    g0, g1, g2 = actions.per_player[0], actions.per_player[w1], actions.per_player[w2]
    bits3 = A.bits.reshape(actions.shape)
    pair_lt_k = np.abs(g1[:, None] - g2[None, :]) < k

    # manager: interaction term x = a1 * 1{workers coordinate}
    coord = bits3 & pair_lt_k[None, :, :]
    uncoord = bits3 & ~pair_lt_k[None, :, :]
    has_coord_by_a1 = coord.any(axis=(1, 2))
    rho_hi = 1.0 if has_coord_by_a1.any() else 0.0
    rho_lo = 0.0 if uncoord.any() else 1.0
    x_vals = []
    if has_coord_by_a1.any():
        x_vals.extend(g0[has_coord_by_a1])
    if uncoord.any():
        x_vals.append(0.0)
    th_m = _fit_single(s, np.asarray(x_vals))
    t_lo = float(th_m.min()) * rho_lo
    t_hi = float(th_m.max()) * rho_hi
    m_ok = _slope_band_range(spec, 0, t_lo, t_hi, tol)

    # workers: interaction term x = a1 * own; mixture mean of a1 in [mu_lo, mu_hi]
    mu_vals = g0[bits3.any(axis=(1, 2))]
    mu_lo, mu_hi = float(mu_vals.min()), float(mu_vals.max())
    worker_masks = {}
    worker_ranges = {}
    for wi, gw, axis in ((w1, g1, 2), (w2, g2, 1)):
        proj = bits3.any(axis=axis)  # (n0, n_worker)
        prods = (g0[:, None] * gw[None, :])[proj]
        th_w = _fit_single(s, np.array([prods.min(), prods.max()]))
        s_lo = float(th_w.min()) * mu_lo
        s_hi = float(th_w.max()) * mu_hi
        worker_masks[wi] = _slope_band_range(spec, wi, s_lo, s_hi, tol)
        worker_ranges[wi] = (gw[worker_masks[wi]].min(), gw[worker_masks[wi]].max())

    nd = m_ok[:, None, None] & worker_masks[w1][None, :, None] & worker_masks[w2][None, None, :]
    if coupled:
        # shared-witness window: both workers' targets use the same mixture,
        # so their responses differ by at most the fit-window width, maximized
        # over attainable manager means (plus one grid step of argmax slack
        # per worker)
        w_lo = min(worker_ranges[w1][0], worker_ranges[w2][0])
        w_hi = max(worker_ranges[w1][1], worker_ranges[w2][1])
        mus = np.unique(mu_vals)
        corners_u = [w_lo * mus, w_hi * mus]
        corners_v = [(w_lo * mus) ** 2, w_hi * w_hi * mus * mu_hi]
        th_stack = np.stack([_fit_moments(s, u, v)
                             for u in corners_u for v in corners_v])
        cost = _own_cost(spec, w1)
        gaps = (np.asarray(cost.marginal_inverse(mus * th_stack.max(axis=0)))
                - np.asarray(cost.marginal_inverse(mus * th_stack.min(axis=0))))
        step = max(np.diff(g1).max(initial=0.0), np.diff(g2).max(initial=0.0))
        d_tot = float(gaps.max()) + 2.0 * step + 1e-12
        nd = nd & (np.abs(g1[:, None] - g2[None, :]) <= d_tot)[None, :, :]
    return OperatorResult(SurvivorSet(nd.ravel(), A.k + 1))


def _structured_apply(spec: GameSpec, A: SurvivorSet, tol: float,
                      coupled: bool) -> OperatorResult:
    if spec.structure is None:
        raise ValueError("StructuredMoments requires an effort-family game")
    if spec.n_players == 1:
        return _structured_solo(spec, A, tol)
    return _structured_team(spec, A, tol, coupled)


# ---------------------------------------------------------------------------
# public operators

def gamma_apply(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                tol: float = DEFAULT_TOL) -> OperatorResult:
    """Profiles justifiable by one common mixture over A."""
    if A.count == 0:
        raise EmptySurvivorSet("cannot apply the operator to an empty set")
    if isinstance(policy, StructuredMoments):
        res = _structured_apply(spec, A, tol, coupled=True)
    elif (spec.is_pointwise_identified(tol)
          and spec.actions.n_profiles <= LP_MAX_PROFILES):
        res = _lp_gamma(spec, A, tol)
    elif spec.structure is not None:
        res = _structured_apply(spec, A, tol, coupled=True)
    else:
        res = _mesh_gamma(spec, A, policy, tol)
    if res.survivors.count == 0:
        raise EmptySurvivorSet("no profile survived; spec inconsistent or "
                               "mixture search too coarse")
    return res


def _player_sets(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                 tol: float) -> list[np.ndarray]:
    if isinstance(policy, StructuredMoments):
        res = _structured_apply(spec, A, tol, coupled=False)
        return res.survivors.projections(spec.actions)
    if (spec.is_pointwise_identified(tol)
            and spec.actions.n_profiles <= LP_MAX_PROFILES):
        return _lp_player_sets(spec, A, tol)
    if spec.structure is not None:
        res = _structured_apply(spec, A, tol, coupled=False)
        return res.survivors.projections(spec.actions)
    return _mesh_player_sets(spec, A, policy, tol)


def gamma_weak_apply(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                     tol: float = DEFAULT_TOL) -> OperatorResult:
    """Profiles justifiable when each player picks a private mixture over A."""
    if A.count == 0:
        raise EmptySurvivorSet("cannot apply the operator to an empty set")
    masks = _player_sets(spec, A, policy, tol)
    nd = np.ones(spec.actions.shape, dtype=bool)
    for i, m in enumerate(masks):
        shape = [1] * spec.actions.n_players
        shape[i] = m.size
        nd &= m.reshape(shape)
    out = SurvivorSet(nd.ravel(), A.k + 1)
    if out.count == 0:
        raise EmptySurvivorSet("no profile survived the per-player search")
    return OperatorResult(out)


def gamma_bp_apply(spec: GameSpec, A: SurvivorSet, policy: SigmaSearchPolicy,
                   tol: float = DEFAULT_TOL) -> OperatorResult:
    """Per-player-conjecture elimination on the product hull of A."""
    hull = A.product_hull(spec.actions)
    return gamma_weak_apply(spec, hull, policy, tol)


def iterate_to_fixed(spec: GameSpec, policy: SigmaSearchPolicy,
                     max_rounds: int = 200, tol: float = DEFAULT_TOL,
                     operator: str = "gamma") -> SolveResult:
    """Apply the chosen operator from the full grid until the bitmask
    repeats; the largest fixed set is the limit of this descent."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    apply_fn = {"gamma": gamma_apply, "weak": gamma_weak_apply,
                "bp": gamma_bp_apply}[operator]
    current = SurvivorSet.full(spec.actions.n_profiles)
    history = [current.indices()]
    witnesses: dict[int, Witness] = {}
    for _ in range(max_rounds):
        res = apply_fn(spec, current, policy, tol)
        # keep the descent monotone: finite sigma meshes over the alive set
        # are not themselves monotone in the set, so intersect each round
        nxt = SurvivorSet(res.survivors.bits & current.bits, current.k + 1)
        history.append(nxt.indices())
        witnesses = {p: w for p, w in res.witnesses.items() if nxt.bits[p]}
        if nxt.same_bits(current):
            return SolveResult(nxt, history, True, witnesses)
        current = nxt
    raise NotConverged("operator iteration hit the round limit",
                       history=SolveResult(current, history, False, witnesses))


def bne_check(spec: GameSpec, profile: int, tol: float = DEFAULT_TOL) -> bool:
    """Does the profile survive with the witness forced to its point mass?"""
    sigma = ProfileMixture.point_mass(profile)
    prof_idx = spec.actions.all_profile_indices()[profile]
    for i in range(spec.n_players):
        own, _ = _player_survival_for_mixture(spec, sigma, i, tol)
        if int(prof_idx[i]) not in own:
            return False
    return True


def phi_apply(spec: GameSpec, candidate: ProfileMixture, B: SurvivorSet,
              policy: SigmaSearchPolicy, tol: float = DEFAULT_TOL) -> bool:
    """True iff every support profile of the candidate distribution lies in B
    and has a witness mixture over B."""
    res = gamma_apply(spec, B, policy, tol)
    alive = res.survivors.bits & B.bits
    return bool(alive[candidate.support].all())


# ---------------------------------------------------------------------------
# mixed/logit operator

MixedProfile = tuple[np.ndarray, ...]


def logit_response(spec: GameSpec, player: int, belief: ParamBelief,
                   opp: OpponentMarginal, perturb: LogitPerturbation) -> np.ndarray:
    """Multinomial-logit choice probabilities over the player's actions."""
    u = utility_profile(spec, player, belief, opp)
    z = (u - u.max()) / perturb.scale
    w = np.exp(z)
    return w / w.sum()


def _mixed_to_mixture(spec: GameSpec, point: MixedProfile) -> ProfileMixture:
    dense = point[0]
    for v in point[1:]:
        dense = np.multiply.outer(dense, v)
    return ProfileMixture.from_dense(dense.ravel(), tol=0.0)


def phi_mixed_step(spec: GameSpec, cloud: list[MixedProfile],
                   perturb: LogitPerturbation,
                   tol: float = DEFAULT_TOL) -> list[MixedProfile]:
    """Image of the cloud under the logit-response map at the best-fit
    belief of each point's induced profile distribution."""
    out = []
    for point in cloud:
        sigma = _mixed_to_mixture(spec, point)
        responses = []
        for i in range(spec.n_players):
            mins = kl_minimizer_set(spec, sigma, i, tol)
            if mins.size != 1:
                raise UnidentifiedModel(
                    f"player {spec.players[i]} has a best-fit tie; the "
                    "mixed-response map needs a unique minimizer")
            belief = ParamBelief.point_mass(spec.n_theta(i), int(mins[0]))
            opp = sigma.opponent_marginal(spec.actions, i)
            responses.append(logit_response(spec, i, belief, opp, perturb))
        out.append(tuple(responses))
    return out


def _cloud_distance(a: list[MixedProfile], b: list[MixedProfile]) -> float:
    """Symmetric Hausdorff distance in the sup norm over stacked simplexes."""
    av = np.array([np.concatenate(p) for p in a])
    bv = np.array([np.concatenate(p) for p in b])
    d = np.abs(av[:, None, :] - bv[None, :, :]).max(axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def seed_cloud(spec: GameSpec, mesh: int = 11) -> list[MixedProfile]:
    """Initial cloud: product of per-player simplex meshes."""
    per_player = [simplex_grid_weights(n, mesh) for n in spec.actions.shape]
    counts = [len(w) for w in per_player]
    cloud = []
    for flat in range(int(np.prod(counts))):
        pos = np.unravel_index(flat, counts)
        cloud.append(tuple(per_player[i][pos[i]] for i in range(spec.n_players)))
    return cloud


def _dedup_cloud(cloud: list[MixedProfile], decimals: int = 10) -> list[MixedProfile]:
    seen = {}
    for p in cloud:
        key = tuple(np.round(np.concatenate(p), decimals).tolist())
        seen.setdefault(key, p)
    return list(seen.values())


def phi_mixed_iterate(spec: GameSpec, perturb: LogitPerturbation,
                      mesh: int = 11, max_rounds: int = 200,
                      tol: float = 1e-8,
                      cloud: list[MixedProfile] | None = None) -> tuple[list[MixedProfile], bool]:
    """Iterate the mixed-response image from a simplex-mesh cloud; the limit
    cloud approximates the largest fixed set of the perturbed operator."""
    if cloud is None:
        cloud = seed_cloud(spec, mesh)
    for _ in range(max_rounds):
        new = _dedup_cloud(phi_mixed_step(spec, cloud, perturb))
        if _cloud_distance(new, cloud) < tol:
            return new, True
        cloud = new
    return cloud, False


def phi_mixed_annealed(spec: GameSpec, scales, mesh: int = 11,
                       max_rounds: int = 200, tol: float = 1e-8) -> list[MixedProfile]:
    """Re-solve at a decreasing sequence of shock scales, warm-starting each
    stage from the previous cloud."""
    cloud = None
    for lam in scales:
        cloud, _ = phi_mixed_iterate(spec, LogitPerturbation(lam), mesh=mesh,
                                     max_rounds=max_rounds, tol=tol, cloud=cloud)
    return cloud
