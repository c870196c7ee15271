"""Numerical audits of the solvability assumptions and the invariant ball.

The equation theory needs: continuous nonnegative forcing, kernels dominated
by x-free majorants whose prefix integrals are bounded, and (for the extremal
construction) kernels nondecreasing in the state.  This module checks those
statements on sample lattices and computes the resulting bounds

    a_sup = sup |a|,   M_i = sup_t integral of m_i(t, s) over [0, t],
    r     = a_sup + M1 * M2,

which define the ball 0 < x <= r that the operator maps into itself.
Everything here reports; nothing raises on a failed check.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .catalog import AffineMajorant, Kernel
from .grids import Grid, trapezoid_prefix
from .problem import Problem, sample_forcing

_MONOTONE_SLACK = 1e-12
_MAJORANT_SLACK = 1e-12


@dataclass(frozen=True)
class Bounds:
    """Sup bounds of the problem data and the invariant-ball radius."""

    a_sup: float
    M1: float
    M2: float
    r: float

    def __post_init__(self):
        if self.a_sup < 0 or self.M1 < 0 or self.M2 < 0:
            raise ValueError("bounds must be nonnegative")
        if self.r != self.a_sup + self.M1 * self.M2:
            raise ValueError("r must equal a_sup + M1*M2 exactly as computed")


@dataclass(frozen=True)
class SampleLattice:
    """Sampling density for the audits: nt x ns time pairs, nx states in (0, x_hi]."""

    nt: int = 33
    ns: int = 33
    nx: int = 9
    x_hi: float | None = None  # defaults to the computed radius r

    def axes(self, T: float, r: float):
        t = np.linspace(0.0, T, self.nt)
        s = np.linspace(0.0, T, self.ns)
        hi = self.x_hi if self.x_hi is not None else r
        x = hi * np.arange(1, self.nx + 1) / self.nx
        return t, s, x


@dataclass(frozen=True)
class MajorantViolation:
    kernel: int
    t: float
    s: float
    x: float
    f_value: float
    m_value: float


@dataclass(frozen=True)
class AuditReport:
    """Outcome of the assumption audits; None means a check was not run."""

    caratheodory_ok: bool | None = None
    majorant_violations: list[MajorantViolation] = field(default_factory=list)
    continuity_in_x_ok: bool | None = None
    nonincreasing_in_t_ok: bool | None = None
    nondecreasing_in_x_ok: bool | None = None
    sample_counts: dict = field(default_factory=dict)

    def merged_with(self, other: "AuditReport") -> "AuditReport":
        def pick(a, b):
            return b if b is not None else a

        return AuditReport(
            caratheodory_ok=pick(self.caratheodory_ok, other.caratheodory_ok),
            majorant_violations=self.majorant_violations + other.majorant_violations,
            continuity_in_x_ok=pick(self.continuity_in_x_ok, other.continuity_in_x_ok),
            nonincreasing_in_t_ok=pick(self.nonincreasing_in_t_ok, other.nonincreasing_in_t_ok),
            nondecreasing_in_x_ok=pick(self.nondecreasing_in_x_ok, other.nondecreasing_in_x_ok),
            sample_counts={**self.sample_counts, **other.sample_counts},
        )

    def to_dict(self) -> dict:
        return {
            "caratheodory_ok": self.caratheodory_ok,
            "majorant_violations": [dataclasses.asdict(v) for v in self.majorant_violations],
            "continuity_in_x_ok": self.continuity_in_x_ok,
            "nonincreasing_in_t_ok": self.nonincreasing_in_t_ok,
            "nondecreasing_in_x_ok": self.nondecreasing_in_x_ok,
            "sample_counts": dict(self.sample_counts),
        }


def majorant_prefix_sup(m: AffineMajorant, grid: Grid) -> float:
    """max over nodes t_i of the trapezoid integral of m(t_i, s) over [0, t_i]."""
    t = grid.nodes()
    rows = m(t[:, None], t[None, :])
    prefixes = trapezoid_prefix(t, rows)
    return float(np.max(np.diagonal(prefixes)))


def compute_bounds(p: Problem, grid: Grid) -> Bounds:
    """Grid sups of the forcing and majorant integrals, and r = a_sup + M1*M2."""
    a = sample_forcing(p, grid)
    a_sup = float(np.max(np.abs(a)))
    M1 = majorant_prefix_sup(p.m1, grid)
    M2 = majorant_prefix_sup(p.m2, grid)
    return Bounds(a_sup=a_sup, M1=M1, M2=M2, r=a_sup + M1 * M2)


def audit_caratheodory(
    p: Problem,
    lattice: SampleLattice = SampleLattice(),
    grid: Grid | None = None,
    continuity_tol: float | None = None,
) -> AuditReport:
    """Check |f_i(t,s,x)| <= m_i(t,s) on the lattice and spot-check x-continuity.

    Violations are recorded, never raised.  The continuity check flags any
    jump between adjacent state samples above ``continuity_tol`` (default:
    half the larger of 1 and the sampled kernel sup) as a discontinuity; a
    continuous kernel's jumps vanish as the state spacing shrinks.
    """
    grid = grid or Grid(p.T, 256)
    bounds = compute_bounds(p, grid)
    t, s, x = lattice.axes(p.T, bounds.r)
    violations: list[MajorantViolation] = []
    continuity_ok = True
    for which, kern, m in ((1, p.f1, p.m1), (2, p.f2, p.m2)):
        fv = kern(t[:, None, None], s[None, :, None], x[None, None, :])
        mv = np.broadcast_to(m(t[:, None, None], s[None, :, None]), fv.shape)
        tol = continuity_tol
        if tol is None:
            tol = 0.5 * max(1.0, float(np.max(np.abs(fv))))
        bad = np.abs(fv) > mv + _MAJORANT_SLACK * np.maximum(1.0, np.abs(mv))
        for it, js, kx in zip(*np.nonzero(bad)):
            violations.append(MajorantViolation(
                kernel=which, t=float(t[it]), s=float(s[js]), x=float(x[kx]),
                f_value=float(fv[it, js, kx]), m_value=float(mv[it, js, kx]),
            ))
        jumps = np.abs(np.diff(fv, axis=2))
        if jumps.size and float(np.max(jumps)) > tol:
            continuity_ok = False
    return AuditReport(
        caratheodory_ok=not violations,
        majorant_violations=violations,
        continuity_in_x_ok=continuity_ok,
        sample_counts={"majorant_points": 2 * t.size * s.size * x.size},
    )


def audit_monotonicity(
    p: Problem,
    lattice: SampleLattice = SampleLattice(),
    grid: Grid | None = None,
) -> AuditReport:
    """Pairwise lattice checks: nonincreasing in t, nondecreasing in x."""
    grid = grid or Grid(p.T, 256)
    bounds = compute_bounds(p, grid)
    t, s, x = lattice.axes(p.T, bounds.r)
    t_ok = True
    x_ok = True
    for kern in (p.f1, p.f2):
        fv = kern(t[:, None, None], s[None, :, None], x[None, None, :])
        if np.any(np.diff(fv, axis=0) > _MONOTONE_SLACK):
            t_ok = False
        if np.any(np.diff(fv, axis=2) < -_MONOTONE_SLACK):
            x_ok = False
    return AuditReport(
        nonincreasing_in_t_ok=t_ok,
        nondecreasing_in_x_ok=x_ok,
        sample_counts={"monotonicity_points": 2 * t.size * s.size * x.size},
    )


def audit_problem(p: Problem, lattice: SampleLattice = SampleLattice(),
                  grid: Grid | None = None) -> AuditReport:
    """Both audits, merged into one report."""
    return audit_caratheodory(p, lattice, grid).merged_with(
        audit_monotonicity(p, lattice, grid))


def resolve_state_caps(p: Problem, grid: Grid, max_passes: int = 5,
                       r_tol: float = 1e-9) -> tuple[Problem, Bounds]:
    """Tie the state caps of x-capped kernels to the ball radius r.

    Tight x-free majorants for state-dependent kernels need a cap, but the
    natural cap is r, which itself depends on the majorants.  One fixed-point
    pass per iteration: recompute the caps at the current r, refresh the
    derived majorants, recompute r; stop after ``max_passes`` or when r moves
    by less than ``r_tol``.  Kernels without a state cap are left alone, as
    are explicitly supplied majorants of uncapped kernels.
    """
    current = p
    bounds = compute_bounds(current, grid)
    for _ in range(max_passes):
        f1, m1 = _recap(current.f1, bounds.r)
        f2, m2 = _recap(current.f2, bounds.r)
        current = current.with_kernels(f1, f2,
                                       m1 if m1 is not None else current.m1,
                                       m2 if m2 is not None else current.m2)
        new_bounds = compute_bounds(current, grid)
        if abs(new_bounds.r - bounds.r) < r_tol:
            bounds = new_bounds
            break
        bounds = new_bounds
    return current, bounds


def _recap(kern: Kernel, cap: float):
    if getattr(kern, "has_state_cap", False):
        updated = dataclasses.replace(kern, x_cap=cap)
        return updated, updated.default_majorant()
    return kern, None
