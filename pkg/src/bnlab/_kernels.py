"""Hot episode loop for linear-Gaussian effort games.

One source of truth: the plain-Python implementation below is compiled with
numba unless the BNLAB_NO_NUMBA environment variable is set, in which case
the interpreted version runs.  Both paths execute the identical statement
sequence, so traces are bit-identical across them.

The forecast enters each player's objective only through a scalar statistic
(the expected interaction term: coordination probability for the manager,
mean leader action for a worker, constant 1 solo), so the smoothed empirical
forecast reduces to a running mean blended with its prior value.
"""

import os

import numpy as np


def effort_episode_impl(grid, cost_vals, theta, alpha, theta_star, alpha_star,
                        role_kind, role_p1, role_p2, threshold,
                        alpha0, prior_stat, noise, unif, logit_scale, forced,
                        actions_out, outcomes_out, post_mean_out, stat_out):
    """Simulate one replication in place.

    grid          (n_a,)    shared action grid
    cost_vals     (P, n_a)  per-player action costs
    theta         (n_t,)    shared parameter grid
    role_kind     (P,)      0 solo, 1 manager, 2 worker
    role_p1/p2    (P,)      manager's worker pair / worker's leader (p1)
    noise, unif   (T, P)    outcome shocks and logit-sampling uniforms
    logit_scale   float     <= 0 means exact best response (lowest index)
    forced        (T, P)    action index to force, -1 for free choice
    outputs       (T, P)    chosen index, outcome, posterior mean, forecast stat
    """
    T = noise.shape[0]
    P = noise.shape[1]
    n_a = grid.shape[0]
    n_t = theta.shape[0]
    logw = np.zeros((P, n_t))
    stat_sum = np.zeros(P)
    acts = np.zeros(P, np.int64)
    scratch = np.zeros(n_a)
    for t in range(T):
        for i in range(P):
            # posterior mean of theta (weights normalized on the fly)
            mx = logw[i, 0]
            for j in range(1, n_t):
                if logw[i, j] > mx:
                    mx = logw[i, j]
            zsum = 0.0
            zdot = 0.0
            for j in range(n_t):
                w = np.exp(logw[i, j] - mx)
                zsum += w
                zdot += w * theta[j]
            th_bar = zdot / zsum
            stat = (alpha0[i] * prior_stat[i] + stat_sum[i]) / (alpha0[i] + t)
            s = th_bar * stat
            if forced[t, i] >= 0:
                a_idx = forced[t, i]
            elif logit_scale > 0.0:
                # sample from softmax of s*b - c(b) by CDF inversion
                umax = s * grid[0] - cost_vals[i, 0]
                for j in range(1, n_a):
                    u = s * grid[j] - cost_vals[i, j]
                    if u > umax:
                        umax = u
                total = 0.0
                for j in range(n_a):
                    w = np.exp((s * grid[j] - cost_vals[i, j] - umax) / logit_scale)
                    scratch[j] = w
                    total += w
                r = unif[t, i] * total
                acc = 0.0
                a_idx = n_a - 1
                for j in range(n_a):
                    acc += scratch[j]
                    if r < acc:
                        a_idx = j
                        break
            else:
                # argmax of the concave s*b - c(b): first index where the
                # forward difference turns nonpositive (lowest-index ties)
                lo = 0
                hi = n_a - 1
                while lo < hi:
                    mid = (lo + hi) // 2
                    d = (s * (grid[mid + 1] - grid[mid])
                         - (cost_vals[i, mid + 1] - cost_vals[i, mid]))
                    if d > 0.0:
                        lo = mid + 1
                    else:
                        hi = mid
                a_idx = lo
            acts[i] = a_idx
            actions_out[t, i] = a_idx
            post_mean_out[t, i] = th_bar
            stat_out[t, i] = stat
        for i in range(P):
            a_val = grid[acts[i]]
            if role_kind[i] == 1:
                gap = grid[acts[role_p1[i]]] - grid[acts[role_p2[i]]]
                if gap < 0.0:
                    gap = -gap
                g = 1.0 if gap < threshold else 0.0
            elif role_kind[i] == 2:
                g = grid[acts[role_p1[i]]]
            else:
                g = 1.0
            slope = alpha + a_val * g
            y = theta_star * (alpha_star + a_val * g) + noise[t, i]
            outcomes_out[t, i] = y
            mx = -1e300
            for j in range(n_t):
                m = theta[j] * slope
                logw[i, j] += -0.5 * (y - m) * (y - m)
                if logw[i, j] > mx:
                    mx = logw[i, j]
            for j in range(n_t):
                logw[i, j] -= mx
            stat_sum[i] += g


if os.environ.get("BNLAB_NO_NUMBA"):
    effort_episode = effort_episode_impl
    USING_NUMBA = False
else:
    from numba import njit

    effort_episode = njit(cache=True, nogil=True)(effort_episode_impl)
    USING_NUMBA = True
