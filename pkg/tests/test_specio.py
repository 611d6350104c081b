import json

import numpy as np
import pytest

from bnlab.errors import SchemaError
from bnlab.search import DirichletSample, SimplexGrid, StructuredMoments
from bnlab.solver import iterate_to_fixed
from bnlab.specio import SpecDocument, result_bundle, trace_to_csv


EFFORT_DOC = {
    "version": 1,
    "family": "effort",
    "theta_star": 1.0, "alpha_star": 1.0, "alpha": 2.0,
    "action_grid": {"min": 0.0, "max": 2.0, "count": 201},
    "param_grid": {"min": 0.0, "max": 2.0, "count": 201},
    "cost": {"kind": "quadratic", "coef": 1.0},
}


def test_roundtrip_lossless():
    doc = SpecDocument.validate(EFFORT_DOC)
    again = SpecDocument.parse(doc.emit())
    assert again.tree == doc.tree
    assert again.sha256() == doc.sha256()
    assert SpecDocument.parse(again.emit()).emit() == again.emit()


def test_parse_rejects_bad_documents():
    with pytest.raises(SchemaError):
        SpecDocument.parse("not json at all {")
    with pytest.raises(SchemaError):
        SpecDocument.validate({"family": "effort"})
    with pytest.raises(SchemaError):
        SpecDocument.validate({**EFFORT_DOC, "version": 99})
    with pytest.raises(SchemaError):
        SpecDocument.validate({**EFFORT_DOC, "family": "lotto"})
    bad_grid = dict(EFFORT_DOC)
    bad_grid["action_grid"] = {"min": 2.0, "max": 0.0, "count": 5}
    with pytest.raises(SchemaError):
        SpecDocument.validate(bad_grid)
    bad_cost = dict(EFFORT_DOC)
    bad_cost["cost"] = {"kind": "cubic"}
    with pytest.raises(SchemaError):
        SpecDocument.validate(bad_cost)
    missing = dict(EFFORT_DOC)
    del missing["alpha"]
    with pytest.raises(SchemaError):
        SpecDocument.validate(missing)


def test_to_game_families():
    g = SpecDocument.validate(EFFORT_DOC).to_game()
    assert g.players == ("agent",)
    assert g.actions.shape == (201,)
    team = dict(EFFORT_DOC)
    team["family"] = "team"
    team["threshold"] = 0.1
    team["action_grid"] = {"min": 0.0, "max": 2.0, "count": 11}
    gt = SpecDocument.validate(team).to_game()
    assert gt.players == ("manager", "worker1", "worker2")
    tab = {
        "version": 1, "family": "tabular",
        "action_counts": [2, 2],
        "payoff_tables": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]],
        "true_probs": [[[0.5, 0.5]] * 4, [[0.5, 0.5]] * 4],
        "family_probs": [[[[0.5, 0.5]] * 4], [[[0.5, 0.5]] * 4]],
        "outcomes": [[0.0, 1.0], [0.0, 1.0]],
    }
    gtab = SpecDocument.validate(tab).to_game()
    assert gtab.actions.n_profiles == 4


def test_policy_selection_and_overrides():
    doc = SpecDocument.validate(EFFORT_DOC)
    assert isinstance(doc.policy(), StructuredMoments)
    assert isinstance(doc.policy("mesh", mesh=7), SimplexGrid)
    assert doc.policy("mesh", mesh=7).mesh == 7
    assert isinstance(doc.policy("dirichlet", seed=5), DirichletSample)
    with pytest.raises(SchemaError):
        doc.policy("quantum")


def test_result_bundle_reproducible_modulo_timings():
    doc = SpecDocument.validate(EFFORT_DOC)
    game = doc.to_game()
    a = iterate_to_fixed(game, StructuredMoments())
    b = iterate_to_fixed(game, StructuredMoments())
    ba = result_bundle(doc, "gamma", StructuredMoments(), a, [0.1])
    bb = result_bundle(doc, "gamma", StructuredMoments(), b, [0.2])
    ba.pop("round_seconds")
    bb.pop("round_seconds")
    assert json.dumps(ba, sort_keys=True) == json.dumps(bb, sort_keys=True)
    assert ba["spec_sha256"] == doc.sha256()


def test_trace_csv_shape_and_determinism():
    from bnlab.learning import RunConfig, run_episode
    doc = SpecDocument.validate(EFFORT_DOC)
    game = doc.to_game()
    tr = run_episode(game, RunConfig(horizon=50, seed=1))
    csv = trace_to_csv(game, tr)
    lines = csv.strip().split("\n")
    assert lines[0] == "t,action_0,outcome_0,post_mean_0"
    assert len(lines) == 51
    assert csv == trace_to_csv(game, run_episode(game, RunConfig(horizon=50, seed=1)))
