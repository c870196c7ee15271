"""Uniform grids on [0, T] and composite-trapezoid prefix integration.

The discretization is Nystrom-style: the unknown lives on the same uniform
grid that carries the quadrature rule, and every integral over [0, t_i] is a
composite trapezoid over the nodes s_0 .. s_i.  The i = 0 integral is defined
to be exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` panels over [0, T].

    Nodes are computed as i*T/n (never by cumulative addition) so that
    t_0 == 0 and t_n == T exactly.
    """

    T: float
    n: int

    def __post_init__(self):
        if not (self.T > 0):
            raise ValueError(f"grid horizon T must be positive, got {self.T}")
        if self.n < 2:
            raise ValueError(f"grid needs at least 2 panels, got n={self.n}")

    @property
    def h(self) -> float:
        return self.T / self.n

    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * (self.T / self.n)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real values sampled at the nodes of a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.grid.n + 1,):
            raise ValueError(
                f"expected {self.grid.n + 1} values for a grid with n={self.grid.n}, "
                f"got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.nodes()), dtype=float))

    @classmethod
    def constant(cls, grid: Grid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.n + 1, float(c)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def trapezoid_prefix(t: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Composite-trapezoid prefix integrals of samples ``g`` along nodes ``t``.

    Works along the last axis, so a matrix of integrand rows is handled in one
    call.  Panel widths come from actual node differences; the running sum is
    sequential, which makes the prefix of g == 1 reproduce t bit-for-bit.
    """
    g = np.asarray(g, dtype=float)
    widths = np.diff(t)
    panels = 0.5 * (g[..., :-1] + g[..., 1:]) * widths
    out = np.zeros_like(g)
    out[..., 1:] = np.cumsum(panels, axis=-1)
    return out


def prefix_integral(g: GridFunction) -> GridFunction:
    """P with P(t_i) = trapezoid integral of g over [0, t_i]; P(t_0) = 0."""
    t = g.grid.nodes()
    return GridFunction(g.grid, trapezoid_prefix(t, g.values))


def convergence_order(
    g: Callable,
    interval: tuple[float, float],
    n_sequence: Sequence[int],
    oracle_n: int = 1_000_000,
) -> "OrderEstimate":
    """Observed order of the composite trapezoid rule for integrand ``g``.

    Integrates g over ``interval`` on each panel count in ``n_sequence`` and
    fits the slope of log error versus log h against a dense-grid oracle with
    ``oracle_n`` panels.  When every error sits at roundoff level the rule is
    reported as exact instead of fitting noise.
    """
    lo, hi = interval
    if hi <= lo:
        raise ValueError("interval must have positive length")
    ns = list(n_sequence)
    if len(ns) < 3 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_sequence must be strictly increasing with >= 3 entries")

    def integrate(n: int) -> float:
        t = lo + np.arange(n + 1) * ((hi - lo) / n)
        vals = np.asarray(g(t), dtype=float)
        return float(trapezoid_prefix(t, vals)[-1])

    reference = integrate(oracle_n)
    errors = np.array([abs(integrate(n) - reference) for n in ns])
    scale = max(1.0, abs(reference))
    if np.all(errors <= 1e-13 * scale):
        return OrderEstimate(order=None, exact=True, errors=errors)

    hs = (hi - lo) / np.array(ns, dtype=float)
    # guard exact rules mixed with tiny errors: clamp to roundoff floor
    log_err = np.log(np.maximum(errors, 1e-300))
    slope = np.polyfit(np.log(hs), log_err, 1)[0]
    return OrderEstimate(order=float(slope), exact=False, errors=errors)


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares order fit; ``exact`` flags error at roundoff level."""

    order: float | None
    exact: bool
    errors: np.ndarray = field(repr=False)
