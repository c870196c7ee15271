"""Sub/supersolution certification and the strict-ordering conclusion.

A subsolution satisfies g <= Fg nodewise, a supersolution g >= Fg.  When the
kernels are nondecreasing in the state and at least one of the two roles is
strict, the certified pair must be strictly ordered at every positive time;
``check_ordering`` tests exactly that conclusion and reports the first
crossing node when it fails.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .assumptions import AuditReport, audit_monotonicity
from .errors import PreconditionUnmet, RoleViolated
from .grids import GridFunction
from .problem import Problem
from .solver import apply_operator


class Role(enum.Enum):
    SUBSOLUTION = "subsolution"
    SUPERSOLUTION = "supersolution"


@dataclass(frozen=True, eq=False)
class SolutionRole:
    """A certified role with its signed slack g - Fg at every node."""

    problem: Problem
    role: Role
    strict: bool
    margin: GridFunction = field(repr=False)
    candidate: GridFunction = field(repr=False)
    slack_tol: float
    strict_margin: float


@dataclass(frozen=True)
class OrderingVerdict:
    ok: bool
    first_crossing_index: int | None
    first_crossing_t: float | None
    min_gap: float

    def __bool__(self) -> bool:
        return self.ok


def certify_role(
    p: Problem,
    g: GridFunction,
    expected: Role,
    tol: float = 1e-10,
    slack_tol: float | None = None,
    strict_margin: float | None = None,
) -> SolutionRole:
    """Certify g as a sub- or supersolution of the problem.

    The inequalities are checked with quantified margins: the role holds when
    the signed slack g - Fg stays on the right side of ``slack_tol``
    (default 10 tol) everywhere, and is strict when it clears
    ``strict_margin`` (default 100 tol) at every node with t > 0.  Raises
    RoleViolated, carrying the worst node, when the certification fails.
    """
    slack_tol = 10.0 * tol if slack_tol is None else slack_tol
    strict_margin = 100.0 * tol if strict_margin is None else strict_margin
    fg = apply_operator(p, g)
    margin = g.values - fg.values
    if expected is Role.SUBSOLUTION:
        worst = int(np.argmax(margin))
        if margin[worst] > slack_tol:
            raise RoleViolated(
                f"not a subsolution: margin {margin[worst]:.3e} > {slack_tol:.3e} "
                f"at node {worst}", node=worst, margin=float(margin[worst]))
        strict = bool(np.all(margin[1:] <= -strict_margin))
    else:
        worst = int(np.argmin(margin))
        if margin[worst] < -slack_tol:
            raise RoleViolated(
                f"not a supersolution: margin {margin[worst]:.3e} < -{slack_tol:.3e} "
                f"at node {worst}", node=worst, margin=float(margin[worst]))
        strict = bool(np.all(margin[1:] >= strict_margin))
    return SolutionRole(
        problem=p,
        role=expected,
        strict=strict,
        margin=GridFunction(g.grid, margin),
        candidate=g,
        slack_tol=slack_tol,
        strict_margin=strict_margin,
    )


def check_ordering(
    sub: SolutionRole,
    sup: SolutionRole,
    monotone_audit: AuditReport | None = None,
) -> OrderingVerdict:
    """Strict nodewise ordering sub < sup at every node with t > 0.

    Preconditions (PreconditionUnmet otherwise): both roles certified against
    the same problem, the kernels audited nondecreasing in the state, roles
    on the same grid, and at least one role strict.  On failure the verdict
    carries the first node where the ordering breaks.
    """
    if sub.role is not Role.SUBSOLUTION or sup.role is not Role.SUPERSOLUTION:
        raise PreconditionUnmet("pass a certified subsolution then a certified supersolution")
    if sub.problem != sup.problem:
        raise PreconditionUnmet("roles were certified against different problems")
    if sub.candidate.grid != sup.candidate.grid:
        raise PreconditionUnmet("roles live on different grids")
    if not (sub.strict or sup.strict):
        raise PreconditionUnmet("at least one role must be strict")
    audit = monotone_audit if monotone_audit is not None else audit_monotonicity(sub.problem)
    if not audit.nondecreasing_in_x_ok:
        raise PreconditionUnmet("kernels were not audited nondecreasing in the state")

    gap = sup.candidate.values - sub.candidate.values
    interior = gap[1:]
    if np.all(interior > 0):
        return OrderingVerdict(
            ok=True, first_crossing_index=None, first_crossing_t=None,
            min_gap=float(np.min(interior)))
    cross = 1 + int(np.argmax(interior <= 0))
    return OrderingVerdict(
        ok=False,
        first_crossing_index=cross,
        first_crossing_t=float(sub.candidate.grid.nodes()[cross]),
        min_gap=float(np.min(interior)),
    )
