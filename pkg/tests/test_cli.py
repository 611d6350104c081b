import json

import numpy as np
import pytest

from bnlab.cli import EXIT_IO, EXIT_SCHEMA, EXIT_UNKNOWN_EXAMPLE, main


EFFORT_DOC = {
    "version": 1,
    "family": "effort",
    "theta_star": 1.0, "alpha_star": 1.0, "alpha": 2.0,
    "action_grid": {"min": 0.0, "max": 2.0, "count": 201},
    "param_grid": {"min": 0.0, "max": 2.0, "count": 201},
    "cost": {"kind": "quadratic", "coef": 1.0},
}


@pytest.fixture
def spec_path(tmp_path):
    p = tmp_path / "game.json"
    p.write_text(json.dumps(EFFORT_DOC))
    return p


def test_solve_then_verify(tmp_path, spec_path):
    out = tmp_path / "result.json"
    assert main(["solve", str(spec_path), "--out", str(out)]) == 0
    bundle = json.loads(out.read_text())
    assert bundle["converged"] is True
    assert len(bundle["survivors"]) >= 1
    assert main(["verify", str(out)]) == 0


def test_verify_detects_tampering(tmp_path, spec_path):
    out = tmp_path / "result.json"
    assert main(["solve", str(spec_path), "--out", str(out)]) == 0
    bundle = json.loads(out.read_text())
    bundle["spec"]["alpha"] = 3.0
    out.write_text(json.dumps(bundle))
    assert main(["verify", str(out)]) != 0


def test_simulate_byte_identical(tmp_path, spec_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    args = ["simulate", str(spec_path), "--horizon", "200", "--reps", "2",
            "--seed", "7"]
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    for name in ("trace_0000.csv", "trace_0001.csv", "containment.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    report = json.loads((out_a / "containment.json").read_text())
    assert 0.0 <= report["pass_rate"] <= 1.0


def test_example_annotations(tmp_path):
    out = tmp_path / "ex"
    assert main(["example", "effort-over", "--out", str(out)]) == 0
    rows = (out / "annotations.csv").read_text().strip().split("\n")
    assert len(rows) >= 2
    vals = [float(r.split(",")[-1]) for r in rows[1:]]
    assert len(vals) == 3
    assert vals == sorted(vals)
    from bnlab.analytic import effort_fixed_points, multi_equilibrium_effort_example
    fps = effort_fixed_points(multi_equilibrium_effort_example())
    assert np.allclose(vals, fps, atol=1e-9)
    assert (out / "curves.csv").exists()


def test_exit_codes(tmp_path, spec_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"version\": 1}")
    assert main(["solve", str(bad), "--out", str(tmp_path / "x.json")]) == EXIT_SCHEMA
    missing = tmp_path / "nope.json"
    assert main(["solve", str(missing), "--out", str(tmp_path / "y.json")]) == EXIT_IO
    assert not (tmp_path / "x.json").exists()
    assert not (tmp_path / "y.json").exists()
    assert main(["example", "bogus", "--out", str(tmp_path / "z")]) == EXIT_UNKNOWN_EXAMPLE
