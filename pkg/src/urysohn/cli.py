"""Batch front-end: read a config, run a mode, emit CSV data and a JSON report.

Modes
    solve     solve the configured problem; solution.csv + report.json
    audit     check the solvability assumptions; audit.json
    extremal  bracket the solution between perturbation families; family.csv
              + report.json with the sandwich verdict
    lemma     randomized strict-ordering falsification harness; lemma.json
    corpus    run the built-in manufactured corpus; per-problem CSVs and a
              pass/fail table

Exit status: 0 all verdicts pass, 1 any failed verdict or non-converged
solve, 2 configuration errors.  Identical config and seed give byte-identical
CSV output; JSON reports have fixed key order.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .assumptions import audit_problem, compute_bounds
from .config import MODES, RunConfig, load_config
from .corpus import manufactured_corpus
from .errors import ConfigError, FamilySolveFailed, UrysohnError
from .extremal import EpsilonSchedule, FamilySign, sandwich_check, solve_family
from .grids import Grid
from .harness import ordering_harness
from .solver import SolveStatus, audit_equicontinuity, picard_solve

CORPUS_SUP_ERROR_LIMIT = 1e-6


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = len(columns[0])
    lines = [",".join(header)]
    for i in range(rows):
        lines.append(",".join(_fmt(float(col[i])) for col in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _bounds_dict(bounds) -> dict:
    return dataclasses.asdict(bounds)


# ---------------------------------------------------------------------------
# mode handlers


def _run_solve(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem
    grid = Grid(p.T, cfg.grid_n)
    audit = audit_problem(p)
    result = picard_solve(p, grid, cfg.solver)
    equi_ok = (audit_equicontinuity(p, result.x, result.bounds)
               if result.converged else None)
    _write_csv(out / "solution.csv", ["t", "x"], [grid.nodes(), result.x.values])
    passed = bool(result.converged and result.bounds_respected
                  and audit.caratheodory_ok)
    _write_json(out / "report.json", {
        "schema": 1,
        "mode": "solve",
        "grid_n": cfg.grid_n,
        "bounds": _bounds_dict(result.bounds),
        "residual_history": [float(r) for r in result.residual_history],
        "iterations": result.iterations,
        "status": result.status.value,
        "bounds_respected": result.bounds_respected,
        "damping_final": result.damping_final,
        "restarts": result.restarts,
        "equicontinuity_ok": equi_ok,
        "audit": audit.to_dict(),
        "passed": passed,
    })
    if result.status is not SolveStatus.CONVERGED:
        print(f"solve: {result.status.value} after {result.iterations} iterations, "
              f"last residual {result.residual_history[-1]:.3e}"
              if len(result.residual_history) else
              f"solve: {result.status.value}")
    if not result.bounds_respected:
        worst = int(np.argmax(result.x.values))
        print(f"solve: iterate leaves (0, r]: x = {result.x.values[worst]:.6g} "
              f"at node {worst}, r = {result.bounds.r:.6g}")
    if not audit.caratheodory_ok:
        print(f"solve: {len(audit.majorant_violations)} majorant violations "
              "(run audit mode for details)")
    print(f"solve: status={result.status.value} iterations={result.iterations} "
          f"passed={passed}")
    return 0 if passed else 1


def _run_audit(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem
    grid = Grid(p.T, cfg.grid_n)
    audit = audit_problem(p, grid=grid)
    bounds = compute_bounds(p, grid)
    passed = bool(audit.caratheodory_ok and audit.continuity_in_x_ok)
    _write_json(out / "audit.json", {
        "schema": 1,
        "mode": "audit",
        "bounds": _bounds_dict(bounds),
        "audit": audit.to_dict(),
        "passed": passed,
    })
    for v in audit.majorant_violations[:10]:
        print(f"audit: kernel {v.kernel} exceeds majorant at (t={v.t:.6g}, "
              f"s={v.s:.6g}, x={v.x:.6g}): f={v.f_value:.6g} > m={v.m_value:.6g}")
    extra = len(audit.majorant_violations) - 10
    if extra > 0:
        print(f"audit: ... and {extra} more violations")
    print(f"audit: caratheodory_ok={audit.caratheodory_ok} "
          f"nonincreasing_in_t_ok={audit.nonincreasing_in_t_ok} "
          f"nondecreasing_in_x_ok={audit.nondecreasing_in_x_ok} passed={passed}")
    return 0 if passed else 1


def _run_extremal(cfg: RunConfig, out: Path) -> int:
    p = cfg.problem
    grid = Grid(p.T, cfg.grid_n)
    sched = cfg.extremal_schedule
    base = picard_solve(p, grid, cfg.solver)
    if base.status is not SolveStatus.CONVERGED:
        print(f"extremal: base solve {base.status.value}; cannot bracket")
        _write_json(out / "report.json", {
            "schema": 1, "mode": "extremal", "status": base.status.value,
            "passed": False,
        })
        return 1
    try:
        plus = solve_family(p, sched, FamilySign.MAXIMAL, grid, cfg.solver)
        minus = solve_family(p, sched, FamilySign.MINIMAL, grid, cfg.solver)
    except FamilySolveFailed as exc:
        print(f"extremal: {exc} (member {exc.index}, eps {exc.eps:.6g})")
        _write_json(out / "report.json", {
            "schema": 1, "mode": "extremal", "family_failure": str(exc),
            "passed": False,
        })
        return 1
    eps_last = sched.values()[-1]
    slack = 10.0 * cfg.solver.tol + eps_last**2
    verdict = sandwich_check(p, base, q=plus.last_member, n=minus.last_member,
                             slack=slack)
    family = plus if cfg.extremal_sign is FamilySign.MAXIMAL else minus
    header = ["t"] + [f"x_eps_{k}" for k in range(sched.count)] + ["x_extrap"]
    columns = [grid.nodes()] + [s.x.values for s in family.solutions] \
        + [family.extremal_estimate.values]
    _write_csv(out / "family.csv", header, columns)
    passed = bool(plus.ordering_ok and minus.ordering_ok and verdict.ok)
    gap_plus = float(np.max(np.abs(plus.extremal_estimate.values - base.x.values)))
    gap_minus = float(np.max(np.abs(minus.extremal_estimate.values - base.x.values)))
    _write_json(out / "report.json", {
        "schema": 1,
        "mode": "extremal",
        "eps_values": sched.values(),
        "sign_written": family.sign.label,
        "plus_ordering_ok": plus.ordering_ok,
        "minus_ordering_ok": minus.ordering_ok,
        "plus_clamped": plus.clamped,
        "minus_clamped": minus.clamped,
        "sandwich": {
            "ok": verdict.ok,
            "slack": slack,
            "worst_node": verdict.worst_node,
            "worst_gap": verdict.worst_gap,
            "side": verdict.side,
        },
        "extrapolation_gap_to_solution": {"max": gap_plus, "min": gap_minus},
        "passed": passed,
    })
    if not plus.ordering_ok or not minus.ordering_ok:
        print("extremal: family members are not monotone within the ordering slack")
    if not verdict.ok:
        t_bad = grid.nodes()[verdict.worst_node]
        print(f"extremal: sandwich fails on the {verdict.side} side at node "
              f"{verdict.worst_node} (t={t_bad:.6g}), margin {verdict.worst_gap:.3e}")
    print(f"extremal: ordering(+)={plus.ordering_ok} ordering(-)={minus.ordering_ok} "
          f"sandwich={verdict.ok} passed={passed}")
    return 0 if passed else 1


def _run_lemma(cfg: RunConfig, out: Path) -> int:
    report = ordering_harness(seed=cfg.seed, count=cfg.lemma_problems,
                              grid_n=cfg.grid_n, tol=cfg.solver.tol)
    _write_json(out / "lemma.json", {
        "schema": 1,
        "mode": "lemma",
        "seed": cfg.seed,
        **report.to_dict(),
    })
    for c in report.counterexamples:
        print(f"lemma: counterexample at problem {c.index}: ordering breaks at "
              f"t={c.first_crossing_t:.6g}, gap {c.min_gap:.3e}")
    print(f"lemma: problems={report.problems_run} certified={report.certified_pairs} "
          f"counterexamples={len(report.counterexamples)} passed={report.ok}")
    return 0 if report.ok else 1


def _run_corpus(cfg: RunConfig, out: Path) -> int:
    rows = []
    all_passed = True
    for entry in manufactured_corpus():
        grid = Grid(entry.problem.T, cfg.grid_n)
        result = picard_solve(entry.problem, grid, cfg.solver)
        exact = entry.exact_on(grid.nodes())
        sup_error = float(np.max(np.abs(result.x.values - exact)))
        passed = bool(result.converged and sup_error <= CORPUS_SUP_ERROR_LIMIT)
        all_passed = all_passed and passed
        rows.append((entry.pid, result, sup_error, passed))
        _write_csv(out / f"solution_{entry.pid}.csv", ["t", "x"],
                   [grid.nodes(), result.x.values])

    _write_csv(
        out / "corpus_results.csv",
        ["sup_error", "iterations", "passed"],
        [np.array([r[2] for r in rows]),
         np.array([float(r[1].iterations) for r in rows]),
         np.array([1.0 if r[3] else 0.0 for r in rows])],
    )
    _write_json(out / "corpus.json", {
        "schema": 1,
        "mode": "corpus",
        "grid_n": cfg.grid_n,
        "seed": cfg.seed,
        "sup_error_limit": CORPUS_SUP_ERROR_LIMIT,
        "problems": [
            {"pid": pid, "sup_error": err, "iterations": res.iterations,
             "status": res.status.value, "passed": ok}
            for pid, res, err, ok in rows
        ],
        "passed": all_passed,
    })
    width = max(len(r[0]) for r in rows)
    print(f"{'problem'.ljust(width)}  {'sup_error':>12}  {'iters':>5}  status")
    for pid, res, err, ok in rows:
        flag = "pass" if ok else "FAIL"
        print(f"{pid.ljust(width)}  {err:12.3e}  {res.iterations:5d}  "
              f"{res.status.value} [{flag}]")
    print(f"corpus: {sum(1 for r in rows if r[3])}/{len(rows)} passed")
    return 0 if all_passed else 1


_HANDLERS = {
    "solve": _run_solve,
    "audit": _run_audit,
    "extremal": _run_extremal,
    "lemma": _run_lemma,
    "corpus": _run_corpus,
}


# ---------------------------------------------------------------------------
# argument wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urysohn",
        description="Solve and audit quadratic integral equations of "
                    "product-of-integrals type.",
    )
    parser.add_argument("--config", type=str, help="path to a YAML run config")
    parser.add_argument("--mode", choices=MODES, help="override the config mode")
    parser.add_argument("--grid-n", type=int, help="override the grid panel count")
    parser.add_argument("--tol", type=float, help="override the solver tolerance")
    parser.add_argument("--eps0", type=float, help="override the perturbation start")
    parser.add_argument("--rho", type=float, help="override the perturbation decay ratio")
    parser.add_argument("--count", type=int, help="override the schedule length")
    parser.add_argument("--sign", choices=["max", "min"],
                        help="override the family side written to family.csv")
    parser.add_argument("--out", type=str, help="override the output directory")
    parser.add_argument("--seed", type=int, help="override the random seed")
    return parser


def run(config_path: str | None, overrides: dict) -> int:
    """Load, override, validate, dispatch; returns the process exit code."""
    try:
        cfg = load_config(config_path) if config_path else RunConfig(mode="corpus")
        cfg = _apply_overrides(cfg, overrides)
        _validate_for_mode(cfg, explicit_mode="mode" in overrides or config_path)
    except ConfigError as exc:
        for issue in exc.issues:
            print(f"config error: {issue}", file=sys.stderr)
        return 2
    except (OSError, ValueError, UrysohnError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _HANDLERS[cfg.mode](cfg, out)


def _apply_overrides(cfg: RunConfig, ov: dict) -> RunConfig:
    if "mode" in ov:
        cfg = replace(cfg, mode=ov["mode"])
    if "grid_n" in ov:
        if ov["grid_n"] < 2:
            raise ConfigError(["--grid-n: grid_n >= 2"])
        cfg = replace(cfg, grid_n=ov["grid_n"])
    if "out" in ov:
        cfg = replace(cfg, output_dir=ov["out"])
    if "seed" in ov:
        cfg = replace(cfg, seed=ov["seed"])
    if "tol" in ov:
        try:
            cfg = replace(cfg, solver=replace(cfg.solver, tol=ov["tol"]))
        except ValueError as exc:
            raise ConfigError([f"--tol: {exc}"]) from None
    sched_over = {k: ov[k] for k in ("eps0", "rho", "count") if k in ov}
    if sched_over:
        try:
            cfg = replace(cfg, extremal_schedule=replace(cfg.extremal_schedule, **sched_over))
        except ValueError as exc:
            raise ConfigError([f"--eps0/--rho/--count: {exc}"]) from None
    if "sign" in ov:
        cfg = replace(cfg, extremal_sign=FamilySign.MAXIMAL if ov["sign"] == "max"
                      else FamilySign.MINIMAL)
    return cfg


def _validate_for_mode(cfg: RunConfig, explicit_mode) -> None:
    if not explicit_mode:
        raise ConfigError(["no --config given; pick a mode with --mode"])
    if cfg.mode in ("solve", "audit", "extremal") and cfg.problem is None:
        raise ConfigError([f"mode {cfg.mode!r} needs a problem section in the config"])


def main(argv: list[str] | None = None) -> int:
    ns = _build_parser().parse_args(argv)
    overrides = {
        key: getattr(ns, attr)
        for key, attr in (
            ("mode", "mode"), ("grid_n", "grid_n"), ("tol", "tol"),
            ("eps0", "eps0"), ("rho", "rho"), ("count", "count"),
            ("sign", "sign"), ("out", "out"), ("seed", "seed"),
        )
        if getattr(ns, attr) is not None
    }
    return run(ns.config, overrides)


if __name__ == "__main__":
    sys.exit(main())
