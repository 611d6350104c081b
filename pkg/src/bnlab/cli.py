"""Command-line frontend: solve, simulate, example, verify."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import analytic
from .errors import (BnlabError, EmptySurvivorSet, NotConverged, SchemaError,
                     UnknownExample)
from .learning import RunConfig, containment_report, run_many
from .solver import iterate_to_fixed, verify_witness, SurvivorSet, Witness
from .specio import SpecDocument, result_bundle, trace_to_csv, witness_to_dict
from .models import ParamBelief, ProfileMixture

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_NOT_CONVERGED = 3
EXIT_EMPTY = 4
EXIT_UNKNOWN_EXAMPLE = 5
EXIT_IO = 6


def _load_doc(path: str) -> SpecDocument:
    return SpecDocument.parse(Path(path).read_text())


def _write(path: str, text: str):
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)


def cmd_solve(args) -> int:
    doc = _load_doc(args.spec)
    game = doc.to_game()
    policy = doc.policy(args.policy, args.mesh, args.seed)
    timings = []
    t0 = time.perf_counter()
    result = iterate_to_fixed(game, policy, max_rounds=args.max_rounds,
                              tol=args.tol, operator=args.operator)
    timings.append(time.perf_counter() - t0)
    bundle = result_bundle(doc, args.operator, policy, result, timings)
    _write(args.out, json.dumps(bundle, indent=2) + "\n")
    print(f"converged in {result.rounds} rounds; "
          f"{result.survivors.count} surviving profiles -> {args.out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    doc = _load_doc(args.spec)
    game = doc.to_game()
    sim = dict(doc.tree.get("sim", {}))
    cfg = RunConfig(
        horizon=args.horizon or sim.get("horizon", 10000),
        reps=args.reps or sim.get("reps", 10),
        seed=args.seed if args.seed is not None else sim.get("seed", 0),
        alpha0=sim.get("alpha0", 1.0),
        window_frac=sim.get("window_frac", 0.2),
        eps=args.eps if args.eps is not None else sim.get("eps", 0.02))
    policy = doc.policy(args.policy, args.mesh, args.seed)
    solved = iterate_to_fixed(game, policy, tol=args.tol)
    traces = run_many(game, cfg)
    report = containment_report(game, traces, solved.survivors, cfg.eps, cfg)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for rep, trace in enumerate(traces):
        (outdir / f"trace_{rep:04d}.csv").write_text(trace_to_csv(game, trace))
    summary = {
        "spec_sha256": doc.sha256(),
        "survivors_checked": solved.survivors.indices().tolist(),
        "horizon": cfg.horizon, "reps": cfg.reps, "seed": cfg.seed,
        "eps": cfg.eps, "pass_rate": report.pass_rate,
        "fractions": report.fractions,
    }
    (outdir / "containment.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"containment pass rate {report.pass_rate:.3f} over {cfg.reps} reps "
          f"-> {outdir}")
    return EXIT_OK


def _example_instance(name: str):
    if name == "effort-over":
        return analytic.multi_equilibrium_effort_example()
    if name == "effort-under":
        return analytic.cycling_effort_example()
    if name == "team":
        return analytic.standard_team_example()
    raise UnknownExample(f"unknown example {name!r}; "
                         "choose effort-over, effort-under, or team")


def cmd_example(args) -> int:
    ex = _example_instance(args.name)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    annotations = []
    if isinstance(ex, analytic.TeamExample):
        m_inf, n_inf, k_star = analytic.team_limits(ex)
        grid = np.linspace(0.0, ex.action_cap, 1001)
        rows = ["a,theta_m_manager,marginal_cost"]
        solo = analytic.EffortExample(ex.theta_star, ex.alpha_star, ex.alpha, ex.cost)
        for a in grid:
            rows.append("%.17g,%.17g,%.17g" % (
                a, analytic.effort_theta_m(solo, a), ex.cost.marginal(a)))
        annotations.append(("limit_manager", m_inf))
        annotations.append(("limit_worker", n_inf))
        annotations.append(("critical_threshold", k_star))
    else:
        grid = np.linspace(0.0, ex.action_cap, 1001)
        rows = ["a,theta_m,marginal_cost"]
        for a in grid:
            rows.append("%.17g,%.17g,%.17g" % (
                a, analytic.effort_theta_m(ex, a), ex.cost.marginal(a)))
        if ex.regime == analytic.UNDERCONFIDENT:
            lo, hi = analytic.effort_rationalizable_interval(ex)
            annotations.append(("cycle_low", lo))
            annotations.append(("cycle_high", hi))
        for i, fp in enumerate(analytic.effort_fixed_points(ex)):
            annotations.append((f"equilibrium_{i}", fp))
    (outdir / "curves.csv").write_text("\n".join(rows) + "\n")
    ann = ["kind,value"] + ["%s,%.17g" % kv for kv in annotations]
    (outdir / "annotations.csv").write_text("\n".join(ann) + "\n")
    print(f"wrote {args.name} curves and {len(annotations)} annotations -> {outdir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    bundle = json.loads(Path(args.bundle).read_text())
    doc = SpecDocument.validate(bundle["spec"])
    if doc.sha256() != bundle["spec_sha256"]:
        print("spec hash mismatch", file=sys.stderr)
        return EXIT_SCHEMA
    game = doc.to_game()
    bad = 0
    for prof, wd in bundle["witnesses"].items():
        sigma = ProfileMixture(np.array(wd["support"]), np.array(wd["weights"]))
        beliefs = []
        for i, b in enumerate(wd["beliefs"]):
            w = np.zeros(game.n_theta(i))
            w[np.array(b["theta_indices"], dtype=int)] = b["theta_weights"]
            beliefs.append(ParamBelief(w))
        if not verify_witness(game, int(prof), Witness(sigma, tuple(beliefs)),
                              tol=args.tol):
            bad += 1
            print(f"witness for profile {prof} failed replay", file=sys.stderr)
    survivors = SurvivorSet.from_indices(game.actions.n_profiles,
                                         bundle["survivors"])
    policy = doc.policy()
    again = iterate_to_fixed(game, policy, operator=bundle["operator"],
                             tol=args.tol)
    if not again.survivors.same_bits(survivors):
        print("re-solve does not reproduce the recorded survivor set",
              file=sys.stderr)
        return EXIT_SCHEMA
    if bad:
        print(f"{bad} witnesses failed", file=sys.stderr)
        return EXIT_SCHEMA
    print(f"bundle verified: {survivors.count} survivors, "
          f"{len(bundle['witnesses'])} witnesses replayed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bnlab",
        description="Solve and simulate misspecified-learning games")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="iterate an elimination operator to its fixed set")
    sp.add_argument("spec")
    sp.add_argument("--operator", choices=("gamma", "bp", "weak"), default="gamma")
    sp.add_argument("--policy", choices=("structured", "mesh", "dirichlet"))
    sp.add_argument("--mesh", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--max-rounds", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_solve)

    sm = sub.add_parser("simulate", help="run the learning dynamic and check containment")
    sm.add_argument("spec")
    sm.add_argument("--horizon", type=int)
    sm.add_argument("--reps", type=int)
    sm.add_argument("--seed", type=int)
    sm.add_argument("--eps", type=float)
    sm.add_argument("--policy", choices=("structured", "mesh", "dirichlet"))
    sm.add_argument("--mesh", type=int)
    sm.add_argument("--tol", type=float, default=1e-9)
    sm.add_argument("--out", required=True)
    sm.set_defaults(func=cmd_simulate)

    se = sub.add_parser("example", help="emit closed-form curve data for a worked example")
    se.add_argument("name")
    se.add_argument("--out", required=True)
    se.set_defaults(func=cmd_example)

    sv = sub.add_parser("verify", help="replay a result bundle's witnesses")
    sv.add_argument("bundle")
    sv.add_argument("--tol", type=float, default=1e-9)
    sv.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except NotConverged as e:
        print(f"did not converge: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except EmptySurvivorSet as e:
        print(f"empty survivor set: {e}", file=sys.stderr)
        return EXIT_EMPTY
    except UnknownExample as e:
        print(str(e), file=sys.stderr)
        return EXIT_UNKNOWN_EXAMPLE
    except BnlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
