"""Discretized product-of-integrals operator and the damped Picard solver.

The discrete mapping sends a grid function x to

    (Fx)(t_i) = a(t_i) + Q1(t_i) * Q2(t_i),

where Q_k(t_i) is the composite trapezoid of s -> f_k(t_i, s, x(s)) over the
nodes s_0 .. s_i.  Q_k(t_0) = 0, so (Fx)(t_0) = a(0) always.  The solver runs
damped fixed-point iteration x <- (1-theta) x + theta Fx with an automatic
theta-halving ladder on divergence signals.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .assumptions import Bounds, compute_bounds
from .errors import EvaluationError
from .grids import Grid, GridFunction, trapezoid_prefix
from .problem import Problem, sample_forcing

_MAX_HALVINGS = 6
_DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    ``x0`` selects the initial iterate: None samples the forcing (a is a
    natural subsolution candidate for nonnegative kernels), a float gives a
    constant start, a GridFunction is used as given.
    """

    tol: float = 1e-10
    max_iter: int = 200
    damping: float = 1.0
    x0: float | GridFunction | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (0.0 < self.damping <= 1.0):
            raise ValueError("damping must lie in (0, 1]")


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"


@dataclass(frozen=True, eq=False)
class SolveResult:
    x: GridFunction
    residual_history: np.ndarray = field(repr=False)
    iterations: int
    status: SolveStatus
    bounds_respected: bool
    bounds: Bounds
    damping_final: float
    restarts: int

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


def _kernel_values_at_nodes(kern, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Integrand prefix integrals at every node, in one pass.

    Kernels without t dependence need a single integrand row; the general
    case builds the full (t_i, s_j) matrix and reads the prefix diagonal.
    """
    if not kern.depends_on_t:
        row = kern(0.0, t, x)
        return trapezoid_prefix(t, row)
    matrix = kern(t[:, None], t[None, :], x[None, :])
    prefixes = trapezoid_prefix(t, matrix)
    return np.diagonal(prefixes).copy()


def inner_integrals(p: Problem, x: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """Both kernel prefix integrals of x at every node."""
    t = x.grid.nodes()
    q1 = _kernel_values_at_nodes(p.f1, t, x.values)
    q2 = _kernel_values_at_nodes(p.f2, t, x.values)
    return q1, q2


def kernel_prefix_integral(p: Problem, which: int, x: GridFunction, i: int) -> float:
    """Trapezoid of s -> f_which(t_i, s, x(s)) over the nodes s_0 .. s_i."""
    n = x.grid.n
    if not (0 <= i <= n):
        raise IndexError(f"node index {i} outside 0..{n}")
    if np.any(x.values <= 0):
        warnings.warn("grid function is not strictly positive at all nodes", stacklevel=2)
    if i == 0:
        return 0.0
    kern = p.kernel(which)
    t = x.grid.nodes()
    if not kern.depends_on_t:
        row = kern(0.0, t, x.values)
    else:
        row = kern(t[i], t, x.values)
    return float(trapezoid_prefix(t, row)[i])


def apply_operator(p: Problem, x: GridFunction) -> GridFunction:
    """One application of the discrete mapping; raises on non-finite output."""
    a = sample_forcing(p, x.grid)
    q1, q2 = inner_integrals(p, x)
    out = a + q1 * q2
    if not np.all(np.isfinite(out)):
        raise EvaluationError("operator produced non-finite values")
    return GridFunction(x.grid, out)


def residual(p: Problem, x: GridFunction) -> float:
    """Discrete sup norm of x - Fx."""
    fx = apply_operator(p, x)
    return float(np.max(np.abs(x.values - fx.values)))


def _initial_iterate(p: Problem, grid: Grid, cfg: SolverConfig) -> np.ndarray:
    if cfg.x0 is None:
        return sample_forcing(p, grid)
    if isinstance(cfg.x0, GridFunction):
        if cfg.x0.grid != grid:
            raise ValueError("given initial iterate lives on a different grid")
        return cfg.x0.values.copy()
    return np.full(grid.n + 1, float(cfg.x0))


def picard_solve(p: Problem, grid: Grid, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Damped fixed-point iteration for the discrete equation.

    Stops when the sup-norm residual drops to ``cfg.tol`` (converged), the
    iteration budget runs out, or the iterate escapes (non-finite values or
    sup above 10 r).  An escape triggers the robustness ladder: the damping
    factor is halved and the iteration restarts from the last finite iterate,
    at most six times, after which the result is reported as diverged.
    Divergence is a status, not an exception.
    """
    bounds = compute_bounds(p, grid)
    a = sample_forcing(p, grid)
    theta = cfg.damping
    x = _initial_iterate(p, grid, cfg)
    history: list[float] = []
    restarts = 0
    iterations = 0
    status = SolveStatus.MAX_ITERATIONS
    escape = _DIVERGENCE_FACTOR * max(bounds.r, 1.0)

    while iterations < cfg.max_iter:
        iterations += 1
        q1 = _kernel_values_at_nodes(p.f1, grid.nodes(), x)
        q2 = _kernel_values_at_nodes(p.f2, grid.nodes(), x)
        fx = a + q1 * q2
        if not np.all(np.isfinite(fx)):
            if restarts >= _MAX_HALVINGS:
                status = SolveStatus.DIVERGED
                break
            theta *= 0.5
            restarts += 1
            continue  # keep the current (finite) iterate, retry damped
        res = float(np.max(np.abs(x - fx)))
        history.append(res)
        if res <= cfg.tol:
            status = SolveStatus.CONVERGED
            break
        x_next = (1.0 - theta) * x + theta * fx
        if not np.all(np.isfinite(x_next)) or float(np.max(np.abs(x_next))) > escape:
            if restarts >= _MAX_HALVINGS:
                status = SolveStatus.DIVERGED
                break
            theta *= 0.5
            restarts += 1
            continue  # restart from the last finite iterate
        x = x_next

    xf = GridFunction(grid, x)
    in_ball = bool(np.all(x > 0) and np.all(x <= bounds.r + cfg.tol))
    return SolveResult(
        x=xf,
        residual_history=np.asarray(history),
        iterations=iterations,
        status=status,
        bounds_respected=in_ball,
        bounds=bounds,
        damping_final=theta,
        restarts=restarts,
    )


def equicontinuity_gaps(p: Problem, x: GridFunction, bounds: Bounds | None = None) -> np.ndarray:
    """Modulus-of-continuity audit: LHS minus RHS per adjacent node pair.

    For each panel, |Fx(t_{i+1}) - Fx(t_i)| must stay below
    |a(t_{i+1}) - a(t_i)| + M1 * (panel integral of m2) + M2 * (panel of m1).
    Panel integrals take the larger of the two time evaluations of the
    majorant, the conservative reading of the bound.  Nonpositive entries in
    the returned array mean the bound holds at that panel.
    """
    grid = x.grid
    bounds = bounds or compute_bounds(p, grid)
    fx = apply_operator(p, x).values
    a = sample_forcing(p, grid)
    t = grid.nodes()
    lhs = np.abs(np.diff(fx))
    da = np.abs(np.diff(a))
    panels = []
    for m in (p.m1, p.m2):
        lo = np.maximum(m(t[:-1], t[:-1]), m(t[1:], t[:-1]))
        hi = np.maximum(m(t[:-1], t[1:]), m(t[1:], t[1:]))
        panels.append(0.5 * np.diff(t) * (lo + hi))
    rhs = da + bounds.M1 * panels[1] + bounds.M2 * panels[0]
    return lhs - rhs


def equicontinuity_slack(p: Problem, grid: Grid) -> float:
    """Audit slack: 4 h^2 times the declared majorant curvature, plus a roundoff floor."""
    curvature = p.m1.curvature_bound + p.m2.curvature_bound
    return 4.0 * grid.h ** 2 * curvature + 1e-12


def audit_equicontinuity(p: Problem, x: GridFunction,
                         bounds: Bounds | None = None) -> bool:
    gaps = equicontinuity_gaps(p, x, bounds)
    return bool(np.all(gaps <= equicontinuity_slack(p, x.grid)))


def solve_on_refined(p: Problem, cfg: SolverConfig, n_values: list[int]) -> list[SolveResult]:
    """Solve the same problem on a ladder of grids (no warm starting)."""
    return [picard_solve(p, Grid(p.T, n), replace(cfg, x0=None)) for n in n_values]
