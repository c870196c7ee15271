"""Randomized falsification harness for the strict-ordering property.

For each seeded random problem: solve it, scale the solution down by five
percent (a strict subsolution when the product term stays below the forcing),
solve the +eps perturbed problem (a strict supersolution of the original),
certify both roles, and demand the strict nodewise ordering.  Any certified
pair that fails the ordering is a counterexample, which the test suite treats
as a build-failing event.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .assumptions import audit_problem
from .comparison import Role, certify_role, check_ordering
from .corpus import random_problem
from .errors import RoleViolated
from .extremal import FamilySign, perturb_problem
from .grids import Grid, GridFunction
from .solver import SolverConfig, SolveStatus, picard_solve


@dataclass(frozen=True)
class OrderingCounterexample:
    index: int
    first_crossing_t: float
    min_gap: float


@dataclass(frozen=True)
class HarnessReport:
    problems_run: int
    certified_pairs: int
    counterexamples: list[OrderingCounterexample] = field(default_factory=list)
    skipped_audit: int = 0
    skipped_solve: int = 0
    skipped_certification: int = 0
    skipped_strictness: int = 0

    @property
    def ok(self) -> bool:
        return not self.counterexamples and self.certified_pairs > 0

    def to_dict(self) -> dict:
        return {
            "problems_run": self.problems_run,
            "certified_pairs": self.certified_pairs,
            "counterexamples": [
                {"index": c.index, "first_crossing_t": c.first_crossing_t,
                 "min_gap": c.min_gap}
                for c in self.counterexamples
            ],
            "skipped_audit": self.skipped_audit,
            "skipped_solve": self.skipped_solve,
            "skipped_certification": self.skipped_certification,
            "skipped_strictness": self.skipped_strictness,
            "ok": self.ok,
        }


def ordering_harness(
    seed: int,
    count: int = 200,
    grid_n: int = 100,
    scale_down: float = 0.05,
    eps: float = 0.1,
    tol: float = 1e-10,
) -> HarnessReport:
    """Run ``count`` random problems and hunt for ordering counterexamples."""
    rng = np.random.default_rng(seed)
    cfg = SolverConfig(tol=tol)
    certified = 0
    counterexamples: list[OrderingCounterexample] = []
    skipped_audit = skipped_solve = skipped_cert = skipped_strict = 0

    for index in range(count):
        p = random_problem(rng)
        grid = Grid(p.T, grid_n)
        audit = audit_problem(p)
        if not (audit.caratheodory_ok and audit.nondecreasing_in_x_ok):
            skipped_audit += 1
            continue
        base = picard_solve(p, grid, cfg)
        if base.status is not SolveStatus.CONVERGED:
            skipped_solve += 1
            continue
        perturbed = perturb_problem(p, eps, FamilySign.MAXIMAL).problem
        above = picard_solve(perturbed, grid, replace(cfg, x0=base.x))
        if above.status is not SolveStatus.CONVERGED:
            skipped_solve += 1
            continue
        sub_candidate = GridFunction(grid, (1.0 - scale_down) * base.x.values)
        try:
            sub_role = certify_role(p, sub_candidate, Role.SUBSOLUTION, tol=tol)
            sup_role = certify_role(p, above.x, Role.SUPERSOLUTION, tol=tol)
        except RoleViolated:
            skipped_cert += 1
            continue
        if not (sub_role.strict or sup_role.strict):
            skipped_strict += 1
            continue
        certified += 1
        verdict = check_ordering(sub_role, sup_role, audit)
        if not verdict.ok:
            counterexamples.append(OrderingCounterexample(
                index=index,
                first_crossing_t=verdict.first_crossing_t or 0.0,
                min_gap=verdict.min_gap,
            ))

    return HarnessReport(
        problems_run=count,
        certified_pairs=certified,
        counterexamples=counterexamples,
        skipped_audit=skipped_audit,
        skipped_solve=skipped_solve,
        skipped_certification=skipped_cert,
        skipped_strictness=skipped_strict,
    )
