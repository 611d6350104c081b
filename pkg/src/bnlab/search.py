"""Search policies over mixtures on a finite support.

The existential quantifier over distributions is resolved by finite search;
results downstream are certified subsets (a survivor always carries a witness
mixture, a non-survivor may just be out of the searched family).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SimplexGrid:
    """Exhaustive mesh on the simplex (weights are multiples of 1/mesh)."""

    mesh: int = 11
    max_support: int = 6

    def __post_init__(self):
        if self.mesh < 2:
            raise ValueError("mesh must be >= 2")
        if self.max_support < 1:
            raise ValueError("max_support must be >= 1")


@dataclass(frozen=True)
class DirichletSample:
    """Random mixtures from a flat Dirichlet, fixed seed."""

    count: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")


@dataclass(frozen=True)
class StructuredMoments:
    """Interval/moment iteration for linear-Gaussian effort families."""


SigmaSearchPolicy = SimplexGrid | DirichletSample | StructuredMoments


def simplex_grid_weights(dim: int, mesh: int) -> np.ndarray:
    """All weight vectors on the (dim-1)-simplex with denominators mesh.

    Returns an (n, dim) array; rows sum to 1 exactly.
    """
    if dim == 1:
        return np.ones((1, 1))
    combos = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            combos.append(prefix + [remaining])
            return
        for v in range(remaining + 1):
            rec(prefix + [v], remaining - v, slots - 1)

    rec([], mesh, dim)
    return np.asarray(combos, dtype=float) / mesh


def dirichlet_weights(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(dim), size=count)
    return w


def candidate_weight_sets(dim: int, policy: SigmaSearchPolicy) -> np.ndarray:
    """Weight matrix (n_candidates, dim) for the given policy.

    Point masses on each support element are always included so that single-
    profile witnesses are never missed.
    """
    eye = np.eye(dim)
    if isinstance(policy, SimplexGrid) and dim <= policy.max_support:
        W = simplex_grid_weights(dim, policy.mesh)
    elif isinstance(policy, SimplexGrid):
        # support too large for an exhaustive mesh: fall back to sampling
        W = dirichlet_weights(dim, policy.mesh ** min(dim, 3), seed=policy.mesh)
    elif isinstance(policy, DirichletSample):
        W = dirichlet_weights(dim, policy.count, policy.seed)
    else:
        raise ValueError(f"policy {policy!r} does not enumerate mixtures")
    return np.vstack([eye, W])
