"""Closed-form benchmarks for the effort and team games.

Everything here is derived from the one-dimensional structure of the
linear-Gaussian effort family: the best-fit parameter against a point mass
on action a is theta_star*(alpha_star + a)/(alpha + a), and best responses
reduce to inverting the marginal cost.  These values serve as independent
oracles for the grid solver and the simulator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, NotCorrectlySpecified
from .models import CostFn, QuadraticCost, TabulatedCost

ROOT_TOL = 1e-12

OVERCONFIDENT = "overconfident"
UNDERCONFIDENT = "underconfident"
CORRECT = "correct"


@dataclass(frozen=True)
class EffortExample:
    """Single agent choosing effort a with perceived mean theta*(alpha + a)."""

    theta_star: float
    alpha_star: float
    alpha: float
    cost: CostFn

    def __post_init__(self):
        if self.theta_star <= 0 or self.alpha <= 0 or self.alpha_star < 0:
            raise ValueError("need theta_star > 0, alpha > 0, alpha_star >= 0")

    @property
    def regime(self) -> str:
        if self.alpha > self.alpha_star:
            return OVERCONFIDENT
        if self.alpha < self.alpha_star:
            return UNDERCONFIDENT
        return CORRECT

    @property
    def action_cap(self) -> float:
        """Upper action bound: marginal cost there already exceeds twice
        theta_star, which no admissible belief can justify."""
        return float(self.cost.marginal_inverse(2.0 * self.theta_star))


@dataclass(frozen=True)
class TeamExample:
    """Manager and two workers with a shared wrong productivity constant."""

    theta_star: float
    alpha_star: float
    alpha: float
    threshold: float
    cost: CostFn

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("coordination threshold must be positive")
        if self.theta_star <= 0 or self.alpha <= 0 or self.alpha_star < 0:
            raise ValueError("need theta_star > 0, alpha > 0, alpha_star >= 0")

    @property
    def action_cap(self) -> float:
        return float(self.cost.marginal_inverse(2.0 * self.theta_star))


def _bisect(f, lo: float, hi: float, tol: float = ROOT_TOL, max_iter: int = 200) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NotConverged(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def effort_theta_m(ex: EffortExample, a: float) -> float:
    """Best-fit parameter against constant play at a."""
    return ex.theta_star + ex.theta_star * (ex.alpha_star - ex.alpha) / (ex.alpha + a)


def effort_theta_m_mixture(ex: EffortExample, actions, weights) -> float:
    """Best-fit parameter against a mixture over actions.

    The minimizer is a convex combination of the single-action values with
    weights proportional to (alpha + a)^2 times the mixture weight.
    """
    actions = np.asarray(actions, dtype=float)
    weights = np.asarray(weights, dtype=float)
    eta = weights * np.square(ex.alpha + actions)
    eta = eta / eta.sum()
    singles = np.array([effort_theta_m(ex, a) for a in actions])
    return float(eta @ singles)


def effort_T(ex: EffortExample, a: float) -> float:
    """One step of belief formation + best response against constant play."""
    return float(ex.cost.marginal_inverse(effort_theta_m(ex, a)))


def effort_rationalizable_interval(
    ex: EffortExample, tol: float = ROOT_TOL, max_iter: int = 100000
) -> tuple[float, float]:
    """Limit interval of the iterated elimination in the effort game.

    With the agent overconfident the response map T is increasing and the
    interval endpoints iterate separately; underconfident, T is decreasing
    and the endpoints follow the crossed recursion, converging to a 2-cycle
    of T (a pair of fixed points of T∘T).
    """
    lo, hi = 0.0, ex.action_cap
    crossed = ex.regime == UNDERCONFIDENT
    for _ in range(max_iter):
        if crossed:
            new_lo, new_hi = effort_T(ex, hi), effort_T(ex, lo)
        else:
            new_lo, new_hi = effort_T(ex, lo), effort_T(ex, hi)
        if abs(new_lo - lo) < tol and abs(new_hi - hi) < tol:
            return new_lo, new_hi
        lo, hi = new_lo, new_hi
    raise NotConverged("interval iteration did not settle", history=(lo, hi))


def effort_fixed_points(ex: EffortExample, n_scan: int = 4000, tol: float = ROOT_TOL) -> list[float]:
    """All fixed points of T on [0, action_cap], located by sign-change scan
    plus bisection refinement."""
    cap = ex.action_cap
    xs = np.linspace(0.0, cap, n_scan)
    vals = np.array([effort_T(ex, x) - x for x in xs])
    roots = []
    for j in range(n_scan - 1):
        if vals[j] == 0.0:
            roots.append(float(xs[j]))
        elif vals[j] * vals[j + 1] < 0:
            roots.append(_bisect(lambda x: effort_T(ex, x) - x, xs[j], xs[j + 1], tol))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def worker_best_fit(ex: TeamExample, ex_x: float, ex_x2: float) -> float:
    """Exact best-fit parameter given the first two moments of the product
    X = (manager action) * (own action) under the conjectured distribution."""
    th, als, al = ex.theta_star, ex.alpha_star, ex.alpha
    num = al * als + (al + als) * ex_x + ex_x2
    den = al * al + 2.0 * al * ex_x + ex_x2
    return th * num / den


def team_diff_gap(ex: TeamExample, mu: float, m_hi: float, n_hi: float) -> float:
    """Width of the window containing both workers' best responses when both
    fit beliefs to one shared conjecture with manager mean mu.

    Lower corner takes X = 0; upper corner takes E[X] = n_hi*mu and
    E[X^2] = n_hi^2 * mu * m_hi.
    """
    th_lo = worker_best_fit(ex, 0.0, 0.0)
    th_hi = worker_best_fit(ex, n_hi * mu, n_hi * n_hi * mu * m_hi)
    lo = float(ex.cost.marginal_inverse(mu * min(th_lo, th_hi)))
    hi = float(ex.cost.marginal_inverse(mu * max(th_lo, th_hi)))
    return hi - lo


def team_limits(ex: TeamExample, tol: float = ROOT_TOL) -> tuple[float, float, float]:
    """Upper-envelope limits (M, N) of the team iteration and the critical
    coordination threshold below which the set cannot collapse."""
    th, als, al = ex.theta_star, ex.alpha_star, ex.alpha
    cap = max(ex.action_cap, float(ex.cost.marginal_inverse(th * als / al)) + 1.0)

    def g_manager(m):
        return ex.cost.marginal(m) - th * (als + m) / (al + m)

    m_inf = _bisect(g_manager, 0.0, cap, tol)

    def g_worker(n):
        return ex.cost.marginal(n) - th * m_inf * (als + m_inf * n) / (al + m_inf * n)

    n_inf = _bisect(g_worker, 0.0, cap, tol)
    k_star = n_inf - float(ex.cost.marginal_inverse(m_inf * th * als / al))
    return m_inf, n_inf, k_star


def team_csi_profile(ex: TeamExample) -> tuple[float, float]:
    """Unique surviving profile (M*, N*, N*) under correct specification."""
    if ex.alpha != ex.alpha_star:
        raise NotCorrectlySpecified("team closed form requires alpha == alpha_star")
    m_star = float(ex.cost.marginal_inverse(ex.theta_star))
    n_star = float(ex.cost.marginal_inverse(ex.theta_star * m_star))
    return m_star, n_star


# ---------------------------------------------------------------------------
# stock instances with interesting dynamics

def golden_effort_example() -> EffortExample:
    """Overconfident quadratic-cost instance whose unique fixed point is the
    golden-ratio conjugate (sqrt(5)-1)/2."""
    return EffortExample(theta_star=1.0, alpha_star=1.0, alpha=2.0, cost=QuadraticCost(1.0))


def multi_equilibrium_effort_example() -> EffortExample:
    """Overconfident instance with a saturating-then-rising marginal cost
    giving three fixed points of T (small/middle/large equilibrium)."""
    knots = np.linspace(0.0, 2.5, 501)
    mc = 0.45 / (1.0 + np.exp(-25.0 * (knots - 0.2))) + np.log1p(np.exp(5.0 * (knots - 1.5))) / 5.0
    return EffortExample(theta_star=1.0, alpha_star=1.0, alpha=3.0,
                         cost=TabulatedCost(knots, mc))


def cycling_effort_example() -> EffortExample:
    """Underconfident instance whose crossed endpoint recursion settles on a
    nontrivial 2-cycle rather than a fixed point."""
    knots = np.linspace(0.0, 2.0, 501)
    mc = 1.5 * (1.0 - np.exp(-10.0 * knots)) + 0.5 * np.log1p(np.exp(10.0 * (knots - 1.0)))
    return EffortExample(theta_star=1.0, alpha_star=1.0, alpha=0.5,
                         cost=TabulatedCost(knots, mc))


def standard_team_example(threshold: float = 0.1) -> TeamExample:
    return TeamExample(theta_star=1.0, alpha_star=1.0, alpha=2.0,
                       threshold=threshold, cost=QuadraticCost(1.0))
