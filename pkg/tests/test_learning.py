import numpy as np
import pytest

from bnlab import analytic
from bnlab.errors import DegenerateLikelihood
from bnlab.games import (make_effort_game, make_payoff_game, make_team_game,
                         make_tabular_game)
from bnlab.learning import (ForecastState, PosteriorState, RunConfig,
                            containment_report, forecast_update, limit_points,
                            posterior_decay_masses, posterior_update,
                            run_episode, run_many)
from bnlab.solver import SurvivorSet, iterate_to_fixed
from bnlab.search import StructuredMoments


def test_forecast_prior_at_time_one():
    prior = np.array([0.25, 0.25, 0.25, 0.25])
    st = ForecastState(prior=prior, alpha0=1.0, counts=np.zeros(4), t=1)
    assert np.allclose(st.weights(), prior)


def test_forecast_arithmetic_example():
    # alpha0=1, uniform prior over 4 cells, two observations of cell p:
    # weight(p) = 1/3 * 0.25 + 2/3 * 1 = 0.75
    prior = np.full(4, 0.25)
    st = ForecastState(prior=prior, alpha0=1.0, counts=np.zeros(4), t=1)
    st = forecast_update(st, 2)
    st = forecast_update(st, 2)
    w = st.weights()
    assert w[2] == pytest.approx(0.75, abs=1e-12)
    assert np.allclose(w.sum(), 1.0)
    # full support persists
    assert np.all(w > 0)


def test_forecast_tracks_empirical_limit():
    rng = np.random.default_rng(5)
    prior = np.full(3, 1.0 / 3.0)
    st = ForecastState(prior=prior, alpha0=1.0, counts=np.zeros(3), t=1)
    freq = np.array([0.6, 0.3, 0.1])
    draws = rng.choice(3, size=10 ** 4, p=freq)
    for d in draws:
        st = forecast_update(st, int(d))
    emp = np.bincount(draws, minlength=3) / draws.size
    assert np.abs(st.weights() - emp).max() < 1e-2


def test_posterior_log_odds_gaussian():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=11, n_theta=11)
    st = PosteriorState(log_weights=np.zeros(11))
    prof, y = 4, 1.37
    new = posterior_update(st, g, 0, prof, y)
    th = g.params[0].points
    a = g.actions.per_player[0][prof]
    m = th * (2.0 + a)
    want = -0.5 * ((y - m[3]) ** 2 - (y - m[7]) ** 2)
    got = new.log_weights[3] - new.log_weights[7]
    assert got == pytest.approx(want, abs=1e-12)
    w = new.weights()
    assert abs(w.sum() - 1.0) < 1e-9


def test_posterior_unchanged_for_equal_densities():
    out = np.array([0.0, 1.0])
    probs = np.array([[0.5, 0.5]])
    fam = np.stack([probs, probs])
    g = make_tabular_game((1,), (np.array([[1.0, 2.0]]),), (probs,), (fam,), (out,))
    st = PosteriorState(log_weights=np.log(np.array([0.3, 0.7])))
    new = posterior_update(st, g, 0, 0, 1.0)
    assert np.allclose(new.weights(), [0.3, 0.7])


def test_posterior_degenerate_likelihood_raises():
    out = np.array([0.0, 1.0])
    true = np.array([[1.0, 0.0]])
    fam = np.stack([np.array([[1.0, 0.0]]), np.array([[1.0, 0.0]])])
    g = make_tabular_game((1,), (np.array([[1.0, 2.0]]),), (true,), (fam,), (out,))
    st = PosteriorState(log_weights=np.zeros(2))
    with pytest.raises(DegenerateLikelihood):
        # outcome 1 is impossible under every parameter
        posterior_update(st, g, 0, 0, 1.0)


def test_posterior_decay_lemma_surrogate():
    # force a = 0.5 so the best-fit parameter 0.6 is exactly on a coarse grid
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=5, n_theta=21)
    a_idx = int(np.argmin(np.abs(g.actions.per_player[0] - 0.5)))
    cfg = RunConfig(horizon=2000, reps=200, seed=9)
    masses = posterior_decay_masses(g, (a_idx,), cfg)
    tail = masses[:, -1]
    assert float((tail < 0.01).mean()) >= 0.95
    # fitted slope of the mean log-mass is negative, decisively
    from scipy import stats
    mean = masses.mean(axis=0)
    t = np.arange(1, mean.size + 1)
    ok = mean > 0
    fit = stats.linregress(t[ok], np.log(mean[ok]))
    assert fit.slope < 0
    assert fit.pvalue < 0.01


def test_dominant_action_played_from_start():
    # player 0's action 0 strictly dominates regardless of beliefs
    g = make_payoff_game((np.array([[3.0, 2.0], [1.0, 0.0]]),
                          np.array([[1.0, 0.0], [0.0, 1.0]])))
    tr = run_episode(g, RunConfig(horizon=50, seed=0))
    assert np.all(tr.actions[:, 0] == 0)


def test_trace_determinism_and_empirical_reconstruction():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=101, n_theta=101)
    cfg = RunConfig(horizon=5000, seed=123)
    a = run_episode(g, cfg)
    b = run_episode(g, cfg)
    assert np.array_equal(a.actions, b.actions)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert np.array_equal(a.post_mean, b.post_mean)
    emp = a.empirical(g)
    flat = a.profile_indices(g)
    counts = np.bincount(flat, minlength=g.actions.n_profiles)
    assert np.array_equal(emp, counts / flat.size)


def test_run_many_deterministic_and_ordered():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=51, n_theta=51)
    cfg = RunConfig(horizon=2000, reps=6, seed=77)
    xs = run_many(g, cfg)
    ys = run_many(g, cfg)
    for x, y in zip(xs, ys):
        assert np.array_equal(x.actions, y.actions)
    # reps differ from one another
    assert not np.array_equal(xs[0].outcomes, xs[1].outcomes)


def test_limit_points_cycles_and_constants():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=11, n_theta=11)
    cfg = RunConfig(horizon=1000, seed=0)
    const = run_episode(g, cfg, forced=np.full((1000, 1), 4))
    assert limit_points(const, cfg, g).tolist() == [4]
    cyc = np.tile([2, 7], 500).reshape(1000, 1)
    cyc_tr = run_episode(g, cfg, forced=cyc)
    assert limit_points(cyc_tr, cfg, g).tolist() == [2, 7]


def test_containment_trivial_and_negative_control():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=101, n_theta=101)
    cfg = RunConfig(horizon=4000, seed=3)
    tr = run_episode(g, cfg)
    full = SurvivorSet.full(g.actions.n_profiles)
    rep = containment_report(g, [tr], full, 0.0, cfg)
    assert rep.pass_rate == 1.0
    # negative control: forced play far outside the fixed set
    fixed = iterate_to_fixed(g, StructuredMoments()).survivors
    far = int(np.argmin(np.abs(g.actions.per_player[0] - 1.8)))
    forced = run_episode(g, cfg, forced=np.full((4000, 1), far))
    bad = containment_report(g, [forced], fixed, 0.02, cfg)
    assert bad.pass_rate == 0.0


def test_multi_equilibrium_limits_land_in_band():
    ex = analytic.multi_equilibrium_effort_example()
    fps = analytic.effort_fixed_points(ex)
    g = make_effort_game(ex.theta_star, ex.alpha_star, ex.alpha, cost=ex.cost,
                         n_actions=201, n_theta=201)
    cfg = RunConfig(horizon=20000, reps=10, seed=21)
    traces = run_many(g, cfg)
    grid = g.actions.per_player[0]
    eps = 0.02
    for tr in traces:
        pts = grid[tr.actions[-4000:, 0]]
        assert np.all(pts >= fps[0] - eps)
        assert np.all(pts <= fps[-1] + eps)


def test_underconfident_limits_inside_cycle_interval():
    ex = analytic.cycling_effort_example()
    lo, hi = analytic.effort_rationalizable_interval(ex)
    g = make_effort_game(ex.theta_star, ex.alpha_star, ex.alpha, cost=ex.cost,
                         n_actions=201, n_theta=201)
    cfg = RunConfig(horizon=20000, reps=5, seed=31)
    grid = g.actions.per_player[0]
    for tr in run_many(g, cfg):
        pts = grid[tr.actions[-4000:, 0]]
        assert np.all(pts >= lo - 0.02)
        assert np.all(pts <= hi + 0.02)


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(horizon=0)
    with pytest.raises(ValueError):
        RunConfig(horizon=10, reps=0)
    with pytest.raises(ValueError):
        RunConfig(horizon=10, window_frac=1.5)
    with pytest.raises(ValueError):
        RunConfig(horizon=10, eps=-0.1)
