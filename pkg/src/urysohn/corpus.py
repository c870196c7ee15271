"""Built-in manufactured problems with known solutions, plus a seeded
random problem generator for the falsification harnesses.

Every corpus problem is built by the manufactured-solution route: pick a
positive x*, pick catalog kernels, and set the forcing so that x* solves the
equation (up to the dense-oracle quadrature error).  Several members make the
trapezoid rule exact (integrands affine in s), the rest exercise genuine
O(h^2) behavior.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .catalog import (
    AffineStateKernel,
    ConstantForcing,
    ConstantInTKernel,
    ExpForcing,
    Forcing,
    Kernel,
    PolynomialForcing,
    SeparableKernel,
    ZeroKernel,
)
from .problem import Problem, make_manufactured

DEFAULT_ORACLE_N = 2048


@dataclass(frozen=True)
class CorpusProblem:
    pid: str
    problem: Problem
    x_star: Forcing  # the manufactured exact solution

    def exact_on(self, nodes: np.ndarray) -> np.ndarray:
        return np.asarray(self.x_star(nodes), dtype=float)


def _entry(pid: str, x_star: Forcing, f1: Kernel, f2: Kernel, T: float,
           oracle_n: int = DEFAULT_ORACLE_N) -> CorpusProblem:
    return CorpusProblem(
        pid=pid,
        problem=make_manufactured(x_star, f1, f2, T, oracle_n=oracle_n),
        x_star=x_star,
    )


@lru_cache(maxsize=1)
def manufactured_corpus() -> tuple[CorpusProblem, ...]:
    """The shipped ten-problem corpus."""
    one = ConstantForcing(1.0)
    half_affine = AffineStateKernel(offset=0.0, slope=0.5, x_cap=1.0)
    return (
        _entry("one-affine-half", one, half_affine, half_affine, T=1.0),
        _entry("one-zero", one, ZeroKernel(), ZeroKernel(), T=1.0),
        _entry("ramp-zero", PolynomialForcing((1.0, 1.0)), ZeroKernel(), ZeroKernel(), T=1.0),
        _entry(
            "one-mixed-const", one,
            AffineStateKernel(offset=0.25, slope=0.25, x_cap=1.5),
            AffineStateKernel(offset=0.5, slope=0.0, x_cap=1.5), T=1.0),
        _entry(
            "ramp-affine", PolynomialForcing((1.0, 0.5)),
            AffineStateKernel(offset=0.0, slope=0.5, x_cap=2.0),
            AffineStateKernel(offset=0.0, slope=0.5, x_cap=2.0), T=1.0),
        _entry(
            "one-separable-decay", one,
            SeparableKernel(k0=1.0, kt=-0.25, ks=0.0, state="saturating", g0=1.0),
            AffineStateKernel(offset=0.0, slope=0.5, x_cap=1.0), T=1.0),
        _entry(
            "curved-quadratic", PolynomialForcing((1.0, 0.0, 0.25)),
            AffineStateKernel(offset=0.0, slope=0.5, x_cap=2.0),
            AffineStateKernel(offset=0.0, slope=0.5, x_cap=2.0), T=1.0),
        _entry(
            "curved-mixed", PolynomialForcing((2.0, 0.0, -0.5)),
            ConstantInTKernel(offset=0.2, s_slope=0.2, x_slope=0.1, x_cap=2.5),
            SeparableKernel(k0=0.5, kt=0.0, ks=0.5, state="saturating", g0=1.0), T=1.0),
        _entry(
            "horizon-two", one,
            AffineStateKernel(offset=0.0, slope=0.25, x_cap=1.0),
            AffineStateKernel(offset=0.0, slope=0.25, x_cap=1.0), T=2.0),
        _entry(
            "exp-decay", ExpForcing(amplitude=1.0, rate=-0.5),
            AffineStateKernel(offset=0.0, slope=0.4, x_cap=2.0),
            AffineStateKernel(offset=0.0, slope=0.4, x_cap=2.0), T=1.0),
    )


def corpus_problem(pid: str) -> CorpusProblem:
    for entry in manufactured_corpus():
        if entry.pid == pid:
            return entry
    raise KeyError(f"no corpus problem named {pid!r}")


# ---------------------------------------------------------------------------
# seeded random problems for the harnesses


def _random_kernel(rng: np.random.Generator) -> Kernel:
    pick = rng.random()
    if pick < 0.15:
        return ZeroKernel()
    if pick < 0.45:
        return AffineStateKernel(
            offset=float(rng.uniform(0.0, 0.15)),
            slope=float(rng.uniform(0.0, 0.3)),
            x_cap=3.0,
        )
    if pick < 0.7:
        return ConstantInTKernel(
            offset=float(rng.uniform(0.0, 0.1)),
            s_slope=float(rng.uniform(0.0, 0.2)),
            x_slope=float(rng.uniform(0.0, 0.2)),
            x_cap=3.0,
        )
    state = "saturating" if rng.random() < 0.5 else "linear"
    return SeparableKernel(
        k0=float(rng.uniform(0.1, 0.4)),
        kt=float(rng.uniform(-0.1, 0.0)),
        ks=float(rng.uniform(0.0, 0.2)),
        state=state,
        g0=1.0,
        x_cap=3.0,
    )


def random_problem(rng: np.random.Generator, T: float = 1.0) -> Problem:
    """A random catalog problem with positive forcing and monotone kernels.

    Coefficient ranges keep the product term well below the forcing, so the
    scaled-solution subsolution construction certifies on nearly every draw.
    """
    for _ in range(100):
        coeffs = (
            float(rng.uniform(0.4, 1.2)),
            float(rng.uniform(-0.2, 0.3)),
            float(rng.uniform(-0.15, 0.15)),
        )
        forcing = PolynomialForcing(coeffs)
        t = np.linspace(0.0, T, 101)
        if float(np.min(forcing(t))) < 0.25:
            continue
        return Problem.from_catalog(
            forcing=forcing,
            f1=_random_kernel(rng),
            f2=_random_kernel(rng),
            T=T,
        )
    raise RuntimeError("failed to draw a positive forcing in 100 attempts")
