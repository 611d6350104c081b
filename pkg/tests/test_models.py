import numpy as np
import pytest
from scipy.stats import norm

from bnlab.errors import NonFiniteKL, SchemaError
from bnlab.games import make_effort_game, make_payoff_game
from bnlab.grids import ActionGrid, ParamGrid, uniform_grid
from bnlab.models import (GameSpec, GaussianLinear, LinearPayoff, ParamBelief,
                          ProfileMixture, QuadraticCost, TabularFinite,
                          TabulatedCost, cost_from_dict)


def test_quadratic_cost_basics():
    c = QuadraticCost(2.0)
    a = np.array([0.0, 0.5, 1.0])
    assert np.allclose(c.cost(a), [0.0, 0.25, 1.0])
    assert np.allclose(c.marginal(a), 2.0 * a)
    assert np.allclose(c.marginal_inverse(c.marginal(a)), a)
    with pytest.raises(ValueError):
        QuadraticCost(0.0)


def test_tabulated_cost_matches_known_curve():
    # tabulate c'(a) = a^3 + a and check interpolation against the truth
    knots = np.linspace(0.0, 2.0, 81)
    c = TabulatedCost(knots, knots ** 3 + knots)
    a = np.linspace(0.05, 1.95, 25)
    assert np.allclose(c.marginal(a), a ** 3 + a, atol=2e-3)
    assert np.allclose(c.cost(a), a ** 4 / 4 + a ** 2 / 2, atol=2e-3)
    assert c.marginal(0.0) == 0.0
    assert np.allclose(c.marginal_inverse(c.marginal(a)), a, atol=1e-8)


def test_tabulated_cost_shifts_origin_and_rejects_nonmonotone():
    c = TabulatedCost(np.array([0.0, 1.0, 2.0]), np.array([0.3, 1.3, 2.3]))
    assert c.marginal(0.0) == 0.0
    with pytest.raises(ValueError):
        TabulatedCost(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        TabulatedCost(np.array([0.5, 1.0]), np.array([0.0, 1.0]))


def test_cost_dict_roundtrip():
    c = QuadraticCost(1.5)
    c2 = cost_from_dict(c.to_dict())
    assert c2.coef == 1.5
    t = TabulatedCost(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 3.0]))
    t2 = cost_from_dict(t.to_dict())
    assert np.allclose(t2.marginal([0.3, 1.7]), t.marginal([0.3, 1.7]))
    with pytest.raises(SchemaError):
        cost_from_dict({"kind": "cubic"})
    with pytest.raises(SchemaError):
        cost_from_dict({"kind": "quadratic"})


def test_gaussian_linear_mean_and_logpdf():
    m = GaussianLinear(base=np.array([1.0, 2.0]), slope=np.array([0.5, 1.0]))
    assert np.allclose(m.mean(2.0), [2.0, 4.0])
    assert m.n_profiles == 2
    y = 1.7
    assert np.isclose(m.logpdf(y, 2.0, 0), norm.logpdf(y, loc=2.0, scale=1.0))


def test_tabular_finite_validation():
    with pytest.raises(ValueError):
        TabularFinite(np.array([0.0, 1.0]), np.array([[0.5, 0.4]]))
    with pytest.raises(ValueError):
        TabularFinite(np.array([0.0, 1.0]), np.array([[-0.1, 1.1]]))
    fam = TabularFinite(np.array([0.0, 1.0]),
                        np.array([[[0.5, 0.5]], [[0.2, 0.8]]]))
    assert fam.is_family
    assert np.allclose(fam.row(0, 1), [0.2, 0.8])


def test_profile_mixture_roundtrip_and_marginal():
    grid = ActionGrid((uniform_grid(0, 1, 2), uniform_grid(0, 1, 3)))
    dense = np.array([0.1, 0.0, 0.3, 0.0, 0.6, 0.0])
    mix = ProfileMixture.from_dense(dense)
    assert np.allclose(mix.dense(grid.n_profiles), dense)
    assert abs(mix.weights.sum() - 1.0) < 1e-12
    # player 0's opponent marginal over player 1's actions
    opp = mix.opponent_marginal(grid, 0)
    marg = np.zeros(3)
    marg[opp.support] = opp.weights
    # flats 0, 2, 4 are profiles (0,0), (0,2), (1,1)
    assert np.allclose(marg, [0.1, 0.6, 0.3])


def test_profile_mixture_rejects_bad_weights():
    with pytest.raises(ValueError):
        ProfileMixture(np.array([0, 1]), np.array([0.5, 0.4]))
    with pytest.raises(ValueError):
        ProfileMixture(np.array([], dtype=int), np.array([]))


def test_param_belief_validation():
    with pytest.raises(ValueError):
        ParamBelief(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        ParamBelief(np.array([-0.1, 1.1]))
    b = ParamBelief.uniform_over(5, [1, 3])
    assert np.allclose(b.weights, [0, 0.5, 0, 0.5, 0])


def test_game_spec_positivity_guard():
    outcomes = np.array([0.0, 1.0])
    true = TabularFinite(outcomes, np.array([[0.5, 0.5]]))
    fam = TabularFinite(outcomes, np.array([[[1.0, 0.0]]]))
    grid = ActionGrid((uniform_grid(0, 1, 1),))
    with pytest.raises(NonFiniteKL):
        GameSpec(("p1",), grid, (ParamGrid(np.array([0.0])),), (true,), (fam,),
                 (LinearPayoff(QuadraticCost()),))


def test_pointwise_identification_flags():
    assert make_effort_game(1.0, 1.0, 1.0, n_actions=21, n_theta=21).is_pointwise_identified()
    assert not make_effort_game(1.0, 1.0, 2.0, n_actions=21, n_theta=21).is_pointwise_identified()
    g = make_payoff_game((np.array([[1.0, 0.0], [0.0, 1.0]]),
                          np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert g.is_pointwise_identified()


def test_expected_payoff_effort_closed_form():
    g = make_effort_game(1.0, 1.0, 2.0, n_actions=11, n_theta=11)
    theta_idx = 5
    theta = g.params[0].points[theta_idx]
    profs = np.arange(11)
    a = g.actions.per_player[0]
    want = theta * (2.0 + a) - 0.5 * a ** 2
    assert np.allclose(g.expected_payoff(0, theta_idx, profs), want)
