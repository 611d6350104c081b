import numpy as np
import pytest

from bnlab import analytic
from bnlab.errors import NotCorrectlySpecified
from bnlab.models import QuadraticCost


GOLDEN = 0.61803398874989485  # positive root of a^2 + a - 1


def test_theta_m_point_and_mixture():
    ex = analytic.golden_effort_example()
    assert analytic.effort_theta_m(ex, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert analytic.effort_theta_m(ex, 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
    got = analytic.effort_theta_m_mixture(ex, [0.0, 2.0], [0.5, 0.5])
    assert got == pytest.approx(0.70, abs=1e-15)


def test_mixture_theta_m_matches_grid_scan():
    # independent oracle: dense scan of the expected quadratic KL objective
    ex = analytic.golden_effort_example()
    actions = np.array([0.3, 0.9, 1.7])
    weights = np.array([0.2, 0.5, 0.3])
    thetas = np.linspace(0.0, 2.0, 2_000_001)
    obj = np.zeros_like(thetas)
    for a, w in zip(actions, weights):
        obj += w * 0.5 * ((ex.alpha + a) * thetas - (ex.alpha_star + a) * ex.theta_star) ** 2
    scan = thetas[np.argmin(obj)]
    assert analytic.effort_theta_m_mixture(ex, actions, weights) == pytest.approx(scan, abs=1e-6)


def test_golden_interval_is_singleton_fixed_point():
    ex = analytic.golden_effort_example()
    lo, hi = analytic.effort_rationalizable_interval(ex)
    assert lo == pytest.approx(GOLDEN, abs=1e-9)
    assert hi == pytest.approx(GOLDEN, abs=1e-9)
    # bisection oracle on a^2 + (alpha - theta*) a - theta* alpha* = 0
    assert abs(GOLDEN ** 2 + GOLDEN - 1.0) < 1e-15


def test_correct_specification_collapses_to_foc():
    ex = analytic.EffortExample(1.0, 1.5, 1.5, QuadraticCost(1.0))
    lo, hi = analytic.effort_rationalizable_interval(ex)
    assert lo == pytest.approx(1.0, abs=1e-9)
    assert hi == pytest.approx(1.0, abs=1e-9)


def test_multi_equilibrium_fixed_points():
    ex = analytic.multi_equilibrium_effort_example()
    fps = analytic.effort_fixed_points(ex)
    assert len(fps) == 3
    for fp in fps:
        assert analytic.effort_T(ex, fp) == pytest.approx(fp, abs=1e-9)
    lo, hi = analytic.effort_rationalizable_interval(ex)
    assert lo == pytest.approx(fps[0], abs=1e-9)
    assert hi == pytest.approx(fps[-1], abs=1e-9)


def test_cycling_example_two_cycle():
    ex = analytic.cycling_effort_example()
    lo, hi = analytic.effort_rationalizable_interval(ex)
    assert hi - lo > 0.1  # nontrivial cycle
    assert abs(analytic.effort_T(ex, lo) - hi) < 1e-9
    assert abs(analytic.effort_T(ex, hi) - lo) < 1e-9
    # interior fixed point exists strictly between the cycle endpoints
    fps = analytic.effort_fixed_points(ex)
    assert len(fps) == 1 and lo < fps[0] < hi


def test_team_limits_values_and_residuals():
    ex = analytic.standard_team_example()
    m_inf, n_inf, k_star = analytic.team_limits(ex)
    assert m_inf == pytest.approx(0.618034, abs=1e-6)
    assert n_inf == pytest.approx(0.338261, abs=1e-6)
    assert k_star == pytest.approx(0.029244, abs=1e-6)
    # equation residuals
    c = ex.cost
    # manager limit: fixed point of the solo map
    solo = analytic.EffortExample(ex.theta_star, ex.alpha_star, ex.alpha, c)
    assert abs(analytic.effort_T(solo, m_inf) - m_inf) < 1e-10
    # worker limit: a = (c')^{-1}(theta_m(m_inf) * m_inf) at the worker's fit
    fit = analytic.worker_best_fit(ex, m_inf * n_inf, (m_inf * n_inf) ** 2)
    assert abs(float(c.marginal_inverse(fit * m_inf)) - n_inf) < 1e-10


def test_worker_best_fit_monotone_in_moments():
    ex = analytic.standard_team_example()
    base = analytic.worker_best_fit(ex, 0.3, 0.09)
    assert analytic.worker_best_fit(ex, 0.4, 0.09) != base
    # overconfident case: corner evaluations bound interior points
    vals = [analytic.worker_best_fit(ex, x, x2)
            for x in np.linspace(0.1, 0.5, 9) for x2 in (x ** 2, x ** 2 + 0.05)]
    corners = [analytic.worker_best_fit(ex, x, x2)
               for x in (0.1, 0.5) for x2 in (0.01, 0.30)]
    assert min(corners) <= min(vals) + 1e-12
    assert max(corners) >= max(vals) - 1e-12


def test_team_diff_gap_monotone_in_mu():
    ex = analytic.standard_team_example()
    m_inf, n_inf, _ = analytic.team_limits(ex)
    mus = np.linspace(0.0, 1.0, 1000)
    gaps = np.array([analytic.team_diff_gap(ex, mu, m_inf, n_inf) for mu in mus])
    assert np.all(np.diff(gaps) >= -1e-12)


def test_team_csi_profile_requires_correct_specification():
    ex = analytic.standard_team_example()
    with pytest.raises(NotCorrectlySpecified):
        analytic.team_csi_profile(ex)
    csi = analytic.TeamExample(1.0, 2.0, 2.0, 0.1, QuadraticCost(1.0))
    m_star, n_star = analytic.team_csi_profile(csi)
    assert m_star == pytest.approx(1.0, abs=1e-12)
    assert n_star == pytest.approx(1.0, abs=1e-12)


def test_example_validation():
    with pytest.raises(ValueError):
        analytic.EffortExample(0.0, 1.0, 1.0, QuadraticCost(1.0))
    with pytest.raises(ValueError):
        analytic.TeamExample(1.0, 1.0, 1.0, 0.0, QuadraticCost(1.0))


def test_regime_classification():
    q = QuadraticCost(1.0)
    assert analytic.EffortExample(1.0, 1.0, 2.0, q).regime == analytic.OVERCONFIDENT
    assert analytic.EffortExample(1.0, 1.0, 0.5, q).regime == analytic.UNDERCONFIDENT
    assert analytic.EffortExample(1.0, 1.0, 1.0, q).regime == analytic.CORRECT
