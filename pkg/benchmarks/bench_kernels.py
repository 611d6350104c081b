"""Benchmark the compiled episode kernel against the interpreted fallback.

Usage: python benchmarks/bench_kernels.py [--horizon N] [--reps K]
"""

import argparse
import time

import numpy as np

from bnlab import _kernels
from bnlab.games import make_effort_game, make_team_game
from bnlab.learning import RunConfig, _player_rng, _prior_stat


def episode_args(spec, cfg, rep=0, logit_scale=-1.0):
    s = spec.structure
    grid = spec.actions.per_player[0]
    theta = spec.params[0].points
    P, T = spec.n_players, cfg.horizon
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
    forced = np.full((T, P), -1, np.int64)
    return (grid, cost_vals, theta, float(s.alpha), float(s.theta_star),
            float(s.alpha_star), role_kind, role_p1, role_p2, threshold,
            np.full(P, cfg.alpha0), prior_stat, noise, unif, logit_scale,
            forced)


def time_fn(fn, spec, cfg, reps):
    args = episode_args(spec, cfg)
    T, P = cfg.horizon, spec.n_players
    outs = [np.zeros((T, P), np.int64), np.zeros((T, P)),
            np.zeros((T, P)), np.zeros((T, P))]
    fn(*args, *outs)  # warm-up (and JIT compile on the compiled path)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args, *outs)
    return (time.perf_counter() - t0) / reps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=50_000)
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    cfg = RunConfig(horizon=args.horizon, seed=0)
    cases = [
        ("solo effort 201x201", make_effort_game(1.0, 1.0, 2.0,
                                                 n_actions=201, n_theta=201)),
        ("team 81x201", make_team_game(1.0, 1.0, 2.0, threshold=0.1,
                                       n_actions=81, n_theta=201)),
    ]
    print(f"horizon={args.horizon}, reps={args.reps}, "
          f"compiled path active={_kernels.USING_NUMBA}")
    for name, spec in cases:
        plain = time_fn(_kernels.effort_episode_impl, spec, cfg, args.reps)
        if _kernels.USING_NUMBA:
            jit = time_fn(_kernels.effort_episode, spec, cfg, args.reps)
            print(f"{name:24s} interpreted {plain:8.3f}s  "
                  f"compiled {jit:8.3f}s  speedup {plain / jit:6.1f}x")
        else:
            print(f"{name:24s} interpreted {plain:8.3f}s  "
                  "(set BNLAB_NO_NUMBA= to compare the compiled path)")


if __name__ == "__main__":
    main()
