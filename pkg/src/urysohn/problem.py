"""Problem definition: forcing, two kernels, their majorants, and a horizon.

A problem models the quadratic integral equation

    x(t) = a(t) + (integral of f1(t,s,x(s)) over [0,t])
                * (integral of f2(t,s,x(s)) over [0,t])

on [0, T], with a mapping into the nonnegative reals.  Construction validates
the structural requirements: positive horizon, nonnegative forcing on a
sample grid, and kernel families that stay nonnegative on the square.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import catalog
from .catalog import Forcing, Kernel, AffineMajorant, ManufacturedForcing
from .errors import DomainError, EvaluationError, NonPositiveForcing
from .grids import Grid

_VALIDATION_NODES = 257


@dataclass(frozen=True)
class Problem:
    """A quadratic integral equation instance built from catalog functions.

    ``positive_forcing`` records whether min a > 0 on the validation grid;
    strict positivity of solutions is only guaranteed in that case.
    """

    forcing: Forcing
    f1: Kernel
    f2: Kernel
    m1: AffineMajorant
    m2: AffineMajorant
    T: float
    positive_forcing: bool = field(init=False, compare=False)

    def __post_init__(self):
        if not (self.T > 0):
            raise ValueError(f"horizon T must be positive, got {self.T}")
        t = np.arange(_VALIDATION_NODES) * (self.T / (_VALIDATION_NODES - 1))
        a = np.asarray(self.forcing(t), dtype=float)
        if not np.all(np.isfinite(a)):
            raise EvaluationError("forcing produced non-finite values on [0, T]")
        if np.min(a) < 0:
            raise NonPositiveForcing(
                f"forcing is negative on [0, T]: min a = {np.min(a):.6g} "
                f"at t = {t[int(np.argmin(a))]:.6g}"
            )
        object.__setattr__(self, "positive_forcing", bool(np.min(a) > 0))
        for name, kern in (("f1", self.f1), ("f2", self.f2)):
            base = _unwrap(kern)
            if isinstance(base, catalog.SeparableKernel) and base.time_factor_min(self.T) < 0:
                raise ValueError(
                    f"{name}: separable time factor goes negative on [0, T]^2; "
                    "it would be clamped, invalidating the affine majorant"
                )
        for name, m in (("m1", self.m1), ("m2", self.m2)):
            if m.min_on_square(self.T) < 0:
                raise ValueError(f"{name}: majorant goes negative on [0, T]^2")

    @classmethod
    def from_catalog(cls, forcing: Forcing, f1: Kernel, f2: Kernel, T: float,
                     m1: AffineMajorant | None = None,
                     m2: AffineMajorant | None = None) -> "Problem":
        """Build a problem, deriving majorants from the kernels when omitted."""
        return cls(
            forcing=forcing,
            f1=f1,
            f2=f2,
            m1=m1 if m1 is not None else f1.default_majorant(),
            m2=m2 if m2 is not None else f2.default_majorant(),
            T=T,
        )

    def with_kernels(self, f1: Kernel, f2: Kernel,
                     m1: AffineMajorant, m2: AffineMajorant) -> "Problem":
        return replace(self, f1=f1, f2=f2, m1=m1, m2=m2)

    def kernel(self, which: int) -> Kernel:
        if which == 1:
            return self.f1
        if which == 2:
            return self.f2
        raise ValueError(f"kernel index must be 1 or 2, got {which}")

    def majorant(self, which: int) -> AffineMajorant:
        return self.m1 if which == 1 else self.m2


def _unwrap(kern: Kernel) -> Kernel:
    while isinstance(kern, catalog.PerturbedKernel):
        kern = kern.base
    return kern


def eval_forcing(p: Problem, t: float) -> float:
    """a(t) at a single time; domain-checked against [0, T]."""
    if not (0.0 <= t <= p.T):
        raise DomainError(f"t = {t} outside [0, {p.T}]")
    val = float(p.forcing(t))
    if not np.isfinite(val):
        raise EvaluationError(f"forcing evaluated to {val} at t = {t}")
    return val


def eval_kernel(kern: Kernel, t: float, s: float, x: float,
                horizon: float | None = None) -> float:
    """Kernel value at a single point; warns (never fails) for x == 0."""
    if s < 0 or t < s:
        raise DomainError(f"need 0 <= s <= t, got s = {s}, t = {t}")
    if horizon is not None and t > horizon:
        raise DomainError(f"t = {t} outside [0, {horizon}]")
    if x <= 0:
        warnings.warn(f"kernel evaluated at nonpositive state x = {x}", stacklevel=2)
    val = float(kern(t, s, x))
    if not np.isfinite(val):
        raise EvaluationError(f"kernel {kern.family} evaluated to {val} at "
                              f"(t={t}, s={s}, x={x})")
    return val


def make_manufactured(x_star: Forcing, f1: Kernel, f2: Kernel, T: float,
                      oracle_n: int = 2048) -> Problem:
    """Problem whose exact solution is the prescribed positive x*.

    The forcing is a(t) = x*(t) - Q1(t)*Q2(t) with the inner integrals taken
    against x* by a dense trapezoid rule with ``oracle_n`` panels.  Raises
    NonPositiveForcing when the construction drives a(t) below zero anywhere
    on the oracle-density time grid.
    """
    if oracle_n < 1024:
        raise ValueError("oracle_n must be at least 1024")
    forcing = ManufacturedForcing(x_star=x_star, f1=f1, f2=f2, oracle_n=oracle_n)
    t_check = np.arange(oracle_n + 1) * (T / oracle_n)
    x_vals = np.asarray(x_star(t_check), dtype=float)
    if np.min(x_vals) <= 0:
        raise ValueError("x_star must be strictly positive on [0, T]")
    a_vals = np.asarray(forcing(t_check), dtype=float)
    if np.min(a_vals) < 0:
        i = int(np.argmin(a_vals))
        raise NonPositiveForcing(
            f"manufactured forcing dips to {a_vals[i]:.6g} at t = {t_check[i]:.6g}; "
            "shrink the kernels or raise x_star"
        )
    return Problem.from_catalog(forcing=forcing, f1=f1, f2=f2, T=T)


def sample_forcing(p: Problem, grid: Grid):
    """Forcing sampled on a grid, as a plain array."""
    if abs(grid.T - p.T) > 1e-12 * max(1.0, p.T):
        raise DomainError(f"grid horizon {grid.T} does not match problem horizon {p.T}")
    return np.asarray(p.forcing(grid.nodes()), dtype=float)
