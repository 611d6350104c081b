"""Action and parameter grids with flat profile indexing.

A profile index is a single integer in ``range(n_profiles)`` obtained by
C-order raveling of the per-player action indices (player 0 varies slowest).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _check_strictly_increasing(points: np.ndarray, what: str) -> None:
    if points.size == 0:
        raise ValueError(f"{what} must be nonempty")
    if points.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if not np.all(np.diff(points) > 0):
        raise ValueError(f"{what} must be strictly increasing")


@dataclass(frozen=True)
class ActionGrid:
    """Per-player ordered action points plus flat-profile codec."""

    per_player: tuple[np.ndarray, ...]

    def __post_init__(self):
        pts = tuple(np.asarray(p, dtype=float) for p in self.per_player)
        for i, p in enumerate(pts):
            _check_strictly_increasing(p, f"action grid for player {i}")
        object.__setattr__(self, "per_player", pts)

    @property
    def n_players(self) -> int:
        return len(self.per_player)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(p.size for p in self.per_player)

    @property
    def n_profiles(self) -> int:
        return int(np.prod(self.shape))

    def ravel(self, idx_tuple) -> int:
        return int(np.ravel_multi_index(tuple(idx_tuple), self.shape))

    def unravel(self, flat: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(int(flat), self.shape))

    def profile_values(self, flat: int) -> np.ndarray:
        """Decode a flat index into the vector of action values."""
        idx = self.unravel(flat)
        return np.array([self.per_player[i][j] for i, j in enumerate(idx)])

    def all_profile_indices(self) -> np.ndarray:
        """(n_profiles, n_players) array of per-player action indices."""
        grids = np.indices(self.shape).reshape(self.n_players, -1).T
        return np.ascontiguousarray(grids)

    def all_profile_values(self) -> np.ndarray:
        """(n_profiles, n_players) array of action values."""
        idx = self.all_profile_indices()
        out = np.empty(idx.shape, dtype=float)
        for i in range(self.n_players):
            out[:, i] = self.per_player[i][idx[:, i]]
        return out

    def opponent_shape(self, player: int) -> tuple[int, ...]:
        return tuple(n for i, n in enumerate(self.shape) if i != player)

    def n_opponent_profiles(self, player: int) -> int:
        return int(np.prod(self.opponent_shape(player), dtype=np.int64)) if self.n_players > 1 else 1

    def split_profile(self, flat: int, player: int) -> tuple[int, int]:
        """Split a flat profile index into (own action index, flat opponent index)."""
        idx = self.unravel(flat)
        own = idx[player]
        rest = tuple(v for i, v in enumerate(idx) if i != player)
        if not rest:
            return own, 0
        opp = int(np.ravel_multi_index(rest, self.opponent_shape(player)))
        return own, opp

    def join_profile(self, player: int, own: int, opp_flat: int) -> int:
        """Inverse of :meth:`split_profile`."""
        if self.n_players == 1:
            return int(own)
        rest = np.unravel_index(int(opp_flat), self.opponent_shape(player))
        idx = list(rest)
        idx.insert(player, int(own))
        return self.ravel(idx)


@dataclass(frozen=True)
class ParamGrid:
    """One player's ordered parameter points with enclosing bounds."""

    points: np.ndarray
    lo: float = field(default=None)
    hi: float = field(default=None)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        _check_strictly_increasing(pts, "parameter grid")
        lo = float(pts[0]) if self.lo is None else float(self.lo)
        hi = float(pts[-1]) if self.hi is None else float(self.hi)
        if lo > pts[0] or hi < pts[-1]:
            raise ValueError("parameter bounds must contain all grid points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def n(self) -> int:
        return self.points.size

    def nearest_index(self, value: float) -> int:
        return int(np.argmin(np.abs(self.points - value)))


def uniform_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("grid count must be >= 1")
    if count == 1:
        return np.array([float(lo)])
    return np.linspace(float(lo), float(hi), int(count))
