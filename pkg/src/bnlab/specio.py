"""Declarative game documents and result bundles (JSON round-trip)."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import SchemaError
from .games import make_effort_game, make_tabular_game, make_team_game
from .models import GameSpec, cost_from_dict
from .search import (DirichletSample, SigmaSearchPolicy, SimplexGrid,
                     StructuredMoments)

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"

_REQUIRED = {
    "effort": ("theta_star", "alpha_star", "alpha", "action_grid", "param_grid", "cost"),
    "team": ("theta_star", "alpha_star", "alpha", "threshold",
             "action_grid", "param_grid", "cost"),
    "tabular": ("action_counts", "payoff_tables", "true_probs",
                "family_probs", "outcomes"),
}


def _need(tree: dict, key: str, ctx: str):
    if key not in tree:
        raise SchemaError(f"{ctx}: missing required field {key!r}")
    return tree[key]


def _check_grid(g, ctx: str):
    for key in ("min", "max", "count"):
        _need(g, key, ctx)
    if g["count"] < 1 or g["max"] < g["min"]:
        raise SchemaError(f"{ctx}: degenerate grid")


@dataclass(frozen=True)
class SpecDocument:
    """Validated declarative description of one game."""

    tree: dict

    @classmethod
    def parse(cls, text: str) -> "SpecDocument":
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"not valid JSON: {e}") from None
        return cls.validate(tree)

    @classmethod
    def validate(cls, tree: dict) -> "SpecDocument":
        if not isinstance(tree, dict):
            raise SchemaError("document root must be an object")
        version = _need(tree, "version", "document")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unrecognized schema version {version!r}")
        family = _need(tree, "family", "document")
        if family not in _REQUIRED:
            raise SchemaError(f"unknown model family {family!r}")
        for key in _REQUIRED[family]:
            _need(tree, key, family)
        if family in ("effort", "team"):
            _check_grid(tree["action_grid"], "action_grid")
            _check_grid(tree["param_grid"], "param_grid")
            if tree["cost"].get("kind") not in ("quadratic", "tabulated"):
                raise SchemaError("cost kind must be quadratic or tabulated")
        return cls(tree)

    def emit(self) -> str:
        return json.dumps(self.tree, sort_keys=True, indent=2) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.emit().encode()).hexdigest()

    def to_game(self) -> GameSpec:
        t = self.tree
        if t["family"] == "effort":
            return make_effort_game(
                t["theta_star"], t["alpha_star"], t["alpha"],
                cost=cost_from_dict(t["cost"]),
                action_max=t["action_grid"]["max"],
                n_actions=t["action_grid"]["count"],
                theta_max=t["param_grid"]["max"],
                n_theta=t["param_grid"]["count"])
        if t["family"] == "team":
            cost = cost_from_dict(t["cost"])
            return make_team_game(
                t["theta_star"], t["alpha_star"], t["alpha"], t["threshold"],
                costs=(cost, cost, cost),
                action_max=t["action_grid"]["max"],
                n_actions=t["action_grid"]["count"],
                theta_max=t["param_grid"]["max"],
                n_theta=t["param_grid"]["count"])
        return make_tabular_game(
            tuple(t["action_counts"]),
            tuple(np.asarray(x, dtype=float) for x in t["payoff_tables"]),
            tuple(np.asarray(x, dtype=float) for x in t["true_probs"]),
            tuple(np.asarray(x, dtype=float) for x in t["family_probs"]),
            tuple(np.asarray(x, dtype=float) for x in t["outcomes"]))

    def policy(self, override: str | None = None, mesh: int | None = None,
               seed: int | None = None) -> SigmaSearchPolicy:
        cfg = dict(self.tree.get("solver", {}))
        name = override or cfg.get("policy", self._default_policy())
        if name == "structured":
            return StructuredMoments()
        if name == "mesh":
            return SimplexGrid(mesh=mesh or cfg.get("mesh", 11),
                               max_support=cfg.get("max_support", 6))
        if name == "dirichlet":
            return DirichletSample(count=cfg.get("count", 200),
                                   seed=seed if seed is not None else cfg.get("seed", 0))
        raise SchemaError(f"unknown search policy {name!r}")

    def _default_policy(self) -> str:
        return "structured" if self.tree["family"] in ("effort", "team") else "mesh"


def witness_to_dict(w) -> dict:
    return {
        "support": w.sigma.support.tolist(),
        "weights": w.sigma.weights.tolist(),
        "beliefs": [{"theta_indices": np.flatnonzero(b.weights).tolist(),
                     "theta_weights": b.weights[b.weights > 0].tolist()}
                    for b in w.beliefs],
    }


def result_bundle(doc: SpecDocument, operator: str, policy: SigmaSearchPolicy,
                  result, timings: list[float]) -> dict:
    """JSON-shaped record of one solve: reproducible modulo the timing block."""
    return {
        "tool_version": TOOL_VERSION,
        "spec_sha256": doc.sha256(),
        "spec": doc.tree,
        "operator": operator,
        "policy": repr(policy),
        "converged": result.converged,
        "rounds": result.rounds,
        "survivors": result.survivors.indices().tolist(),
        "history_sizes": [len(h) for h in result.history],
        "witnesses": {str(p): witness_to_dict(w) for p, w in result.witnesses.items()},
        "round_seconds": timings,
    }


def trace_to_csv(spec: GameSpec, trace) -> str:
    """One row per period; floats printed with full round-trip precision."""
    P = spec.n_players
    header = ["t"]
    header += [f"action_{i}" for i in range(P)]
    header += [f"outcome_{i}" for i in range(P)]
    header += [f"post_mean_{i}" for i in range(P)]
    lines = [",".join(header)]
    vals = [spec.actions.per_player[i][trace.actions[:, i]] for i in range(P)]
    for t in range(trace.horizon):
        row = [str(t + 1)]
        row += [("%.17g" % vals[i][t]) for i in range(P)]
        row += [("%.17g" % trace.outcomes[t, i]) for i in range(P)]
        row += [("%.17g" % trace.post_mean[t, i]) for i in range(P)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
