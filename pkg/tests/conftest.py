"""Shared fixtures and oracle helpers for the test suite."""

import numpy as np
import pytest

from bnlab.games import make_effort_game, random_misspecified_game, random_payoff_game


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def effort_game():
    """Overconfident single-agent effort game on a modest grid."""
    return make_effort_game(1.0, 1.0, 2.0, n_actions=201, n_theta=201)


def gauss_hermite_kl(m_true, m_model, nodes=101):
    """Quadrature oracle for the KL divergence between two unit-variance
    Gaussians with the given means."""
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    y = x + m_true
    log_ratio = -0.5 * (y - m_true) ** 2 + 0.5 * (y - m_model) ** 2
    return float(np.sum(w * log_ratio) / np.sqrt(2 * np.pi))


def small_random_game(rng, misspecified=True):
    if misspecified:
        return random_misspecified_game(rng)
    return random_payoff_game(rng)
