"""Maximal/minimal solution estimates via vanishing kernel perturbations.

Shifting both kernels up by eps > 0 produces solutions that strictly dominate
every solution of the original problem; shifting down produces dominated
ones.  Solving along a decreasing eps schedule gives a monotone family whose
limit is the maximal (resp. minimal) solution, estimated here by linear
extrapolation of the last two members to eps = 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .catalog import AffineMajorant, PerturbedKernel
from .errors import FamilySolveFailed
from .grids import Grid, GridFunction
from .problem import Problem
from .solver import SolveResult, SolveStatus, SolverConfig, picard_solve

DEFAULT_ORDERING_SLACK = 1e-8


class FamilySign(enum.Enum):
    """+ shifts kernels up toward the maximal solution, - down toward the minimal."""

    MAXIMAL = 1
    MINIMAL = -1

    @property
    def label(self) -> str:
        return "max" if self is FamilySign.MAXIMAL else "min"


@dataclass(frozen=True)
class EpsilonSchedule:
    """Geometric perturbation sizes eps0 * rho**k for k = 0 .. count-1."""

    eps0: float = 0.1
    rho: float = 0.5
    count: int = 6

    def __post_init__(self):
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")
        if not (0.0 < self.rho < 1.0):
            raise ValueError("decay ratio rho must lie in (0, 1)")
        if self.count < 2:
            raise ValueError("schedule needs at least 2 members")

    def values(self) -> list[float]:
        return [self.eps0 * self.rho**k for k in range(self.count)]


@dataclass(frozen=True)
class PerturbOutcome:
    """Perturbed problem plus a flag for minimal-side clamping at zero."""

    problem: Problem
    clamped: bool


def perturb_problem(p: Problem, eps: float, sign: FamilySign) -> PerturbOutcome:
    """Shift both kernels by +-eps; majorants gain eps on the maximal side.

    On the minimal side a shift larger than the kernel's infimum would leave
    the nonnegative range; the perturbed kernels clamp at zero there and the
    outcome is flagged, not raised.  eps = 0 returns the problem unchanged.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative; pick the side via sign")
    if eps == 0:
        return PerturbOutcome(problem=p, clamped=False)
    shift = eps if sign is FamilySign.MAXIMAL else -eps
    clamped = False
    if sign is FamilySign.MINIMAL:
        for kern in (p.f1, p.f2):
            if eps >= kern.min_on_domain(p.T, np.inf):
                clamped = True
    f1 = PerturbedKernel(base=p.f1, eps=shift)
    f2 = PerturbedKernel(base=p.f2, eps=shift)
    bump = max(shift, 0.0)
    m1 = replace(p.m1, const=p.m1.const + bump)
    m2 = replace(p.m2, const=p.m2.const + bump)
    return PerturbOutcome(problem=p.with_kernels(f1, f2, m1, m2), clamped=clamped)


@dataclass(frozen=True, eq=False)
class EpsilonFamily:
    """Solutions along the schedule plus the eps -> 0 extrapolation.

    ``ordering_ok`` records whether consecutive members are nodewise
    monotone in the expected direction (nonincreasing for the maximal side,
    nondecreasing for the minimal) within ``ordering_slack``.
    """

    schedule: EpsilonSchedule
    sign: FamilySign
    solutions: list[SolveResult] = field(repr=False)
    extremal_estimate: GridFunction = field(repr=False)
    ordering_ok: bool
    ordering_slack: float
    clamped: bool

    @property
    def last_member(self) -> GridFunction:
        return self.solutions[-1].x

    def member_values(self) -> np.ndarray:
        return np.stack([s.x.values for s in self.solutions])


def solve_family(
    p: Problem,
    sched: EpsilonSchedule,
    sign: FamilySign,
    grid: Grid,
    cfg: SolverConfig = SolverConfig(),
    ordering_slack: float = DEFAULT_ORDERING_SLACK,
    warm_start: bool = True,
) -> EpsilonFamily:
    """Solve the perturbed problem for every eps in the schedule.

    Members are solved largest eps first and warm-started from the previous
    member unless disabled.  A member that fails to converge raises
    FamilySolveFailed with its index and eps.  The extremal estimate is the
    two-point linear extrapolation of the last two members to eps = 0:
    x_hat = x_last + (x_last - x_prev) * eps_last / (eps_prev - eps_last).
    """
    eps_values = sched.values()
    solutions: list[SolveResult] = []
    clamped = False
    member_cfg = cfg
    for k, eps in enumerate(eps_values):
        outcome = perturb_problem(p, eps, sign)
        clamped = clamped or outcome.clamped
        result = picard_solve(outcome.problem, grid, member_cfg)
        if result.status is not SolveStatus.CONVERGED:
            raise FamilySolveFailed(
                f"family member {k} (eps = {eps:.6g}) ended with status "
                f"{result.status.value}", index=k, eps=eps)
        solutions.append(result)
        if warm_start:
            member_cfg = replace(cfg, x0=result.x)

    ordering_ok = True
    for prev, nxt in zip(solutions, solutions[1:]):
        step = nxt.x.values - prev.x.values
        if sign is FamilySign.MAXIMAL:
            ordering_ok = ordering_ok and bool(np.all(step <= ordering_slack))
        else:
            ordering_ok = ordering_ok and bool(np.all(step >= -ordering_slack))

    estimate = extrapolate_to_zero(
        solutions[-2].x, solutions[-1].x, eps_values[-2], eps_values[-1])
    return EpsilonFamily(
        schedule=sched,
        sign=sign,
        solutions=solutions,
        extremal_estimate=estimate,
        ordering_ok=ordering_ok,
        ordering_slack=ordering_slack,
        clamped=clamped,
    )


def extrapolate_to_zero(x_prev: GridFunction, x_last: GridFunction,
                        eps_prev: float, eps_last: float) -> GridFunction:
    """Linear-in-eps extrapolation of two family members to eps = 0."""
    if eps_prev <= eps_last:
        raise ValueError("expected eps_prev > eps_last")
    factor = eps_last / (eps_prev - eps_last)
    values = x_last.values + (x_last.values - x_prev.values) * factor
    return GridFunction(x_last.grid, values)


@dataclass(frozen=True)
class SandwichVerdict:
    ok: bool
    worst_node: int
    worst_gap: float  # most negative slackened margin over both sides
    side: str  # "lower" or "upper"

    def __bool__(self) -> bool:
        return self.ok


def sandwich_check(p: Problem, x: SolveResult, q: GridFunction, n: GridFunction,
                   slack: float) -> SandwichVerdict:
    """Verdict on n(t_i) - slack <= x(t_i) <= q(t_i) + slack at every node.

    q should come from a maximal-side family on the problem, n from a
    minimal-side one.  Never raises; the verdict carries the worst node.
    """
    xv = x.x.values
    lower_margin = xv - (n.values - slack)   # >= 0 required
    upper_margin = (q.values + slack) - xv   # >= 0 required
    worst_lower = int(np.argmin(lower_margin))
    worst_upper = int(np.argmin(upper_margin))
    if lower_margin[worst_lower] <= upper_margin[worst_upper]:
        worst_node, worst_gap, side = worst_lower, float(lower_margin[worst_lower]), "lower"
    else:
        worst_node, worst_gap, side = worst_upper, float(upper_margin[worst_upper]), "upper"
    ok = bool(lower_margin[worst_lower] >= 0 and upper_margin[worst_upper] >= 0)
    return SandwichVerdict(ok=ok, worst_node=worst_node, worst_gap=worst_gap, side=side)


def shifted_minimal_family_matches_plus(
    p: Problem, eps0: float, sched: EpsilonSchedule, grid: Grid,
    cfg: SolverConfig = SolverConfig(),
) -> float:
    """Metamorphic identity: minus-family members on the +eps0-shifted problem
    equal single +(eps0 - eps_k) perturbations of the original problem.

    Returns the largest nodewise discrepancy across the schedule.  Requires
    eps0 >= eps for every schedule value so no clamping occurs.
    """
    eps_values = sched.values()
    if eps0 < max(eps_values):
        raise ValueError("shift must dominate every schedule value")
    shifted = perturb_problem(p, eps0, FamilySign.MAXIMAL).problem
    minus_family = solve_family(shifted, sched, FamilySign.MINIMAL, grid, cfg)
    worst = 0.0
    for eps, member in zip(eps_values, minus_family.solutions):
        direct = perturb_problem(p, eps0 - eps, FamilySign.MAXIMAL).problem
        ref = picard_solve(direct, grid, cfg)
        worst = max(worst, float(np.max(np.abs(member.x.values - ref.x.values))))
    return worst
