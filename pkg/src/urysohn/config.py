"""Run configuration: a versioned, human-editable YAML schema.

Unknown keys are errors (no silent typos), every diagnostic names the field
and, where the text provides one, the line it came from.  Functions are
referenced by catalog family name plus a parameter map, never by code.

Example::

    schema: 1
    mode: solve
    grid_n: 400
    seed: 0
    output_dir: out
    problem:
      T: 1.0
      forcing: {family: polynomial, coeffs: [1.0, 0.0, -0.25]}
      kernel1: {family: affine_state, offset: 0.0, slope: 0.5, x_cap: 1.0}
      kernel2: {family: affine_state, offset: 0.0, slope: 0.5, x_cap: 1.0}
    solver: {tol: 1.0e-10, max_iter: 200, damping: 1.0, x0: forcing}
    extremal: {eps0: 0.1, rho: 0.5, count: 6, sign: max}
    lemma: {problems: 200}

``majorant1`` / ``majorant2`` are optional; omitted ones derive from the
kernel families.
"""

from __future__ import annotations

from dataclasses import dataclass

import yaml

from . import catalog
from .errors import ConfigError
from .extremal import EpsilonSchedule, FamilySign
from .problem import Problem
from .solver import SolverConfig

SCHEMA_VERSION = 1
MODES = ("solve", "audit", "extremal", "lemma", "corpus")

_TOP_KEYS = {"schema", "mode", "output_dir", "seed", "grid_n",
             "problem", "solver", "extremal", "lemma"}
_PROBLEM_KEYS = {"T", "forcing", "kernel1", "kernel2", "majorant1", "majorant2"}
_SOLVER_KEYS = {"tol", "max_iter", "damping", "x0"}
_EXTREMAL_KEYS = {"eps0", "rho", "count", "sign"}
_LEMMA_KEYS = {"problems"}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    output_dir: str = "out"
    seed: int = 0
    grid_n: int = 400
    problem: Problem | None = None
    solver: SolverConfig = SolverConfig()
    extremal_schedule: EpsilonSchedule = EpsilonSchedule()
    extremal_sign: FamilySign = FamilySign.MAXIMAL
    lemma_problems: int = 200

    def to_yaml(self) -> str:
        """Canonical serialization; parse_config inverts it exactly."""
        doc: dict = {
            "schema": SCHEMA_VERSION,
            "mode": self.mode,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "grid_n": self.grid_n,
        }
        if self.problem is not None:
            doc["problem"] = {
                "T": self.problem.T,
                "forcing": catalog.describe(self.problem.forcing),
                "kernel1": catalog.describe(self.problem.f1),
                "kernel2": catalog.describe(self.problem.f2),
                "majorant1": catalog.describe(self.problem.m1),
                "majorant2": catalog.describe(self.problem.m2),
            }
        x0 = self.solver.x0
        doc["solver"] = {
            "tol": self.solver.tol,
            "max_iter": self.solver.max_iter,
            "damping": self.solver.damping,
            "x0": "forcing" if x0 is None else float(x0),
        }
        doc["extremal"] = {
            "eps0": self.extremal_schedule.eps0,
            "rho": self.extremal_schedule.rho,
            "count": self.extremal_schedule.count,
            "sign": self.extremal_sign.label,
        }
        doc["lemma"] = {"problems": self.lemma_problems}
        return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


class _Issues:
    """Collects field-level diagnostics with source line positions."""

    def __init__(self, positions: dict):
        self.positions = positions
        self.items: list[str] = []

    def add(self, path: tuple, message: str):
        name = ".".join(str(part) for part in path) if path else "<document>"
        line = self.positions.get(path)
        prefix = f"line {line}: " if line is not None else ""
        self.items.append(f"{prefix}{name}: {message}")


def _node_positions(text: str) -> dict:
    """Map of key paths to 1-based source lines, via the YAML node graph."""
    positions: dict = {}
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return positions
    if root is None:
        return positions

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                sub = path + (key_node.value,)
                positions[sub] = key_node.start_mark.line + 1
                walk(value_node, sub)
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                walk(item, path + (i,))

    walk(root, ())
    return positions


def _expect_map(raw, path, issues: _Issues, allowed: set[str]) -> dict | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        issues.add(path, f"expected a mapping, got {type(raw).__name__}")
        return None
    for key in raw:
        if key not in allowed:
            issues.add(path + (key,), f"unknown key (allowed: {', '.join(sorted(allowed))})")
    return raw


def _get_number(raw: dict, path, key, issues, default=None, required=False,
                integer=False, check=None, rule=""):
    if key not in raw:
        if required:
            issues.add(path + (key,), "required field is missing")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        issues.add(path + (key,), f"expected a number, got {value!r}")
        return default
    if integer:
        if float(value) != int(value):
            issues.add(path + (key,), f"expected an integer, got {value!r}")
            return default
        value = int(value)
    else:
        value = float(value)
    if check is not None and not check(value):
        issues.add(path + (key,), f"value {value!r} violates: {rule}")
        return default
    return value


def _build_function(raw, path, issues, builder, kind):
    if not isinstance(raw, dict) or "family" not in raw:
        issues.add(path, f"expected a {kind} mapping with a 'family' key")
        return None
    try:
        return builder(raw)
    except (ValueError, KeyError, TypeError) as exc:
        issues.add(path, str(exc))
        return None


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate config text; raises ConfigError listing every
    field-level problem found."""
    positions = _node_positions(text)
    issues = _Issues(positions)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a mapping"])

    top = _expect_map(raw, (), issues, _TOP_KEYS) or {}

    schema = _get_number(top, (), "schema", issues, required=True, integer=True)
    if schema is not None and schema != SCHEMA_VERSION:
        issues.add(("schema",), f"unsupported schema version {schema}; this build reads {SCHEMA_VERSION}")

    mode = top.get("mode")
    if mode not in MODES:
        issues.add(("mode",), f"must be one of {', '.join(MODES)}; got {mode!r}")

    output_dir = top.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        issues.add(("output_dir",), "must be a nonempty string")
        output_dir = "out"

    seed = _get_number(top, (), "seed", issues, default=0, integer=True)
    grid_n = _get_number(top, (), "grid_n", issues, default=400, integer=True,
                         check=lambda v: v >= 2, rule="grid_n >= 2")

    problem = None
    praw = _expect_map(top.get("problem"), ("problem",), issues, _PROBLEM_KEYS)
    if praw is not None:
        problem = _parse_problem(praw, ("problem",), issues)
    elif mode in ("solve", "audit", "extremal"):
        issues.add(("problem",), f"mode {mode!r} needs a problem section")

    solver = _parse_solver(top.get("solver"), issues)
    schedule, sign = _parse_extremal(top.get("extremal"), issues)
    lemma_problems = 200
    lraw = _expect_map(top.get("lemma"), ("lemma",), issues, _LEMMA_KEYS)
    if lraw is not None:
        lemma_problems = _get_number(lraw, ("lemma",), "problems", issues, default=200,
                                     integer=True, check=lambda v: v >= 1,
                                     rule="problems >= 1")

    if issues.items:
        raise ConfigError(issues.items)
    return RunConfig(
        mode=mode,
        output_dir=output_dir,
        seed=seed,
        grid_n=grid_n,
        problem=problem,
        solver=solver,
        extremal_schedule=schedule,
        extremal_sign=sign,
        lemma_problems=lemma_problems,
    )


def _parse_problem(praw: dict, path, issues) -> Problem | None:
    T = _get_number(praw, path, "T", issues, required=True,
                    check=lambda v: v > 0, rule="T > 0")
    parts = {}
    for key, builder, kind in (
        ("forcing", catalog.forcing_from_spec, "forcing"),
        ("kernel1", catalog.kernel_from_spec, "kernel"),
        ("kernel2", catalog.kernel_from_spec, "kernel"),
    ):
        if key not in praw:
            issues.add(path + (key,), "required field is missing")
            continue
        parts[key] = _build_function(praw[key], path + (key,), issues, builder, kind)
    majorants = {}
    for key in ("majorant1", "majorant2"):
        if key in praw:
            majorants[key] = _build_function(
                praw[key], path + (key,), issues, catalog.majorant_from_spec, "majorant")
    if T is None or any(parts.get(k) is None for k in ("forcing", "kernel1", "kernel2")):
        return None
    try:
        return Problem.from_catalog(
            forcing=parts["forcing"],
            f1=parts["kernel1"],
            f2=parts["kernel2"],
            T=T,
            m1=majorants.get("majorant1"),
            m2=majorants.get("majorant2"),
        )
    except Exception as exc:
        issues.add(path, f"problem rejected: {exc}")
        return None


def _parse_solver(raw, issues) -> SolverConfig:
    sraw = _expect_map(raw, ("solver",), issues, _SOLVER_KEYS)
    if sraw is None:
        return SolverConfig()
    path = ("solver",)
    tol = _get_number(sraw, path, "tol", issues, default=1e-10,
                      check=lambda v: v > 0, rule="tol > 0")
    max_iter = _get_number(sraw, path, "max_iter", issues, default=200, integer=True,
                           check=lambda v: v >= 1, rule="max_iter >= 1")
    damping = _get_number(sraw, path, "damping", issues, default=1.0,
                          check=lambda v: 0 < v <= 1, rule="damping in (0, 1]")
    x0 = sraw.get("x0", "forcing")
    if x0 == "forcing":
        x0_value = None
    elif isinstance(x0, (int, float)) and not isinstance(x0, bool):
        x0_value = float(x0)
    else:
        issues.add(path + ("x0",), f"expected 'forcing' or a number, got {x0!r}")
        x0_value = None
    try:
        return SolverConfig(tol=tol, max_iter=max_iter, damping=damping, x0=x0_value)
    except ValueError as exc:
        issues.add(path, str(exc))
        return SolverConfig()


def _parse_extremal(raw, issues) -> tuple[EpsilonSchedule, FamilySign]:
    eraw = _expect_map(raw, ("extremal",), issues, _EXTREMAL_KEYS)
    if eraw is None:
        return EpsilonSchedule(), FamilySign.MAXIMAL
    path = ("extremal",)
    eps0 = _get_number(eraw, path, "eps0", issues, default=0.1,
                       check=lambda v: v > 0, rule="eps0 > 0")
    rho = _get_number(eraw, path, "rho", issues, default=0.5,
                      check=lambda v: 0 < v < 1, rule="decay ratio must be in (0, 1)")
    count = _get_number(eraw, path, "count", issues, default=6, integer=True,
                        check=lambda v: v >= 2, rule="count >= 2")
    sign_raw = eraw.get("sign", "max")
    if sign_raw in ("max", "+"):
        sign = FamilySign.MAXIMAL
    elif sign_raw in ("min", "-"):
        sign = FamilySign.MINIMAL
    else:
        issues.add(path + ("sign",), f"expected 'max' or 'min', got {sign_raw!r}")
        sign = FamilySign.MAXIMAL
    try:
        return EpsilonSchedule(eps0=eps0, rho=rho, count=count), sign
    except ValueError as exc:
        issues.add(path, str(exc))
        return EpsilonSchedule(), sign


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
