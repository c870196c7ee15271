"""Solver and hypothesis-verification toolkit for quadratic integral
equations of the form x(t) = a(t) + (int_0^t f1 ds) * (int_0^t f2 ds)."""

from .assumptions import (
    AuditReport,
    Bounds,
    SampleLattice,
    audit_caratheodory,
    audit_monotonicity,
    audit_problem,
    compute_bounds,
    resolve_state_caps,
)
from .catalog import (
    AffineMajorant,
    AffineStateKernel,
    ConstantForcing,
    ConstantInTKernel,
    ExpForcing,
    ManufacturedForcing,
    PerturbedKernel,
    PolynomialForcing,
    ReciprocalForcing,
    SeparableKernel,
    ZeroKernel,
)
from .comparison import OrderingVerdict, Role, SolutionRole, certify_role, check_ordering
from .config import RunConfig, parse_config
from .corpus import CorpusProblem, manufactured_corpus, random_problem
from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    FamilySolveFailed,
    NonPositiveForcing,
    PreconditionUnmet,
    RoleViolated,
    UrysohnError,
)
from .extremal import (
    EpsilonFamily,
    EpsilonSchedule,
    FamilySign,
    SandwichVerdict,
    perturb_problem,
    sandwich_check,
    solve_family,
)
from .grids import Grid, GridFunction, convergence_order, prefix_integral
from .harness import HarnessReport, ordering_harness
from .problem import Problem, eval_forcing, eval_kernel, make_manufactured
from .solver import (
    SolveResult,
    SolveStatus,
    SolverConfig,
    apply_operator,
    audit_equicontinuity,
    kernel_prefix_integral,
    picard_solve,
    residual,
)

__all__ = [
    "AffineMajorant", "AffineStateKernel", "AuditReport", "Bounds",
    "ConfigError", "ConstantForcing", "ConstantInTKernel", "CorpusProblem",
    "DomainError", "EpsilonFamily", "EpsilonSchedule", "EvaluationError",
    "ExpForcing", "FamilySign", "FamilySolveFailed", "Grid", "GridFunction",
    "HarnessReport", "ManufacturedForcing", "NonPositiveForcing",
    "OrderingVerdict", "PerturbedKernel", "PolynomialForcing",
    "PreconditionUnmet", "Problem", "ReciprocalForcing", "Role",
    "RoleViolated", "RunConfig", "SampleLattice", "SandwichVerdict",
    "SeparableKernel", "SolutionRole", "SolveResult", "SolveStatus",
    "SolverConfig", "UrysohnError", "ZeroKernel", "apply_operator",
    "audit_caratheodory", "audit_equicontinuity", "audit_monotonicity",
    "audit_problem", "certify_role", "check_ordering", "compute_bounds",
    "convergence_order", "eval_forcing", "eval_kernel",
    "kernel_prefix_integral", "make_manufactured", "manufactured_corpus",
    "ordering_harness", "parse_config", "perturb_problem", "picard_solve",
    "prefix_integral", "random_problem", "resolve_state_caps", "residual",
    "sandwich_check", "solve_family",
]

__version__ = "0.1.0"
