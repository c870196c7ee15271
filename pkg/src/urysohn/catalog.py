"""Closed catalog of forcing, kernel, and majorant families.

Every function used by a problem comes from this catalog: a family name plus
real parameters.  That keeps the solvability checks honest, because each
kernel family declares its own x-free dominating majorant in closed form and
states truthfully whether it is nonincreasing in t and nondecreasing in x.
Arbitrary user callables are deliberately not accepted.

All families evaluate through numpy and broadcast over array arguments, and
evaluation is pure: same arguments, same bits.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# forcing families: t -> R+


@dataclass(frozen=True)
class ConstantForcing:
    """a(t) = value."""

    value: float
    family = "constant"

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def params(self) -> dict:
        return {"value": self.value}


@dataclass(frozen=True)
class PolynomialForcing:
    """a(t) = coeffs[0] + coeffs[1]*t + coeffs[2]*t**2 + ..."""

    coeffs: tuple[float, ...]
    family = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return np.polynomial.polynomial.polyval(np.asarray(t, dtype=float), self.coeffs)

    def params(self) -> dict:
        return {"coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class ExpForcing:
    """a(t) = amplitude * exp(rate * t); amplitude must be positive."""

    amplitude: float
    rate: float
    family = "exp"

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("exp forcing amplitude must be positive")

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return self.amplitude * np.exp(self.rate * np.asarray(t, dtype=float))

    def params(self) -> dict:
        return {"amplitude": self.amplitude, "rate": self.rate}


@dataclass(frozen=True)
class ReciprocalForcing:
    """a(t) = 1 / (offset + t); offset must be positive."""

    offset: float
    family = "reciprocal"

    def __post_init__(self):
        if self.offset <= 0:
            raise ValueError("reciprocal forcing offset must be positive")

    def __call__(self, t: ArrayLike) -> ArrayLike:
        return 1.0 / (self.offset + np.asarray(t, dtype=float))

    def params(self) -> dict:
        return {"offset": self.offset}


# ---------------------------------------------------------------------------
# majorant family: (t, s) -> R+


@dataclass(frozen=True)
class AffineMajorant:
    """m(t, s) = const + t_coeff*t + s_coeff*s.

    Affine majorants cover every catalog kernel; their second differences
    vanish, so the equicontinuity audit slack they declare is zero.
    """

    const: float
    t_coeff: float = 0.0
    s_coeff: float = 0.0
    family = "affine"
    curvature_bound = 0.0

    def __call__(self, t: ArrayLike, s: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        return self.const + self.t_coeff * t + self.s_coeff * s

    def min_on_square(self, T: float) -> float:
        corners = [self(a, b) for a in (0.0, T) for b in (0.0, T)]
        return float(min(corners))

    def params(self) -> dict:
        return {"const": self.const, "t_coeff": self.t_coeff, "s_coeff": self.s_coeff}


Majorant = AffineMajorant


# ---------------------------------------------------------------------------
# kernel families: (t, s, x) -> R+


@dataclass(frozen=True)
class ZeroKernel:
    """f(t, s, x) = 0."""

    family = "zero"
    depends_on_t = False
    nondecreasing_in_x = True
    nonincreasing_in_t = True

    def __call__(self, t: ArrayLike, s: ArrayLike, x: ArrayLike) -> ArrayLike:
        return np.zeros(np.broadcast(np.asarray(t), np.asarray(s), np.asarray(x)).shape)

    def default_majorant(self) -> AffineMajorant:
        return AffineMajorant(0.0)

    def min_on_domain(self, T: float, x_hi: float) -> float:
        return 0.0

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class AffineStateKernel:
    """f(t, s, x) = max(0, offset + slope * min(x, x_cap)).

    The clip at x_cap makes the declared constant majorant valid for every x,
    not just x below the cap.  A negative slope is allowed (the family then
    declares itself not nondecreasing in x); the outer clamp keeps values in
    R+ in that case.
    """

    offset: float
    slope: float
    x_cap: float
    family = "affine_state"
    depends_on_t = False
    nonincreasing_in_t = True
    has_state_cap = True

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("affine_state offset must be nonnegative")
        if self.x_cap <= 0:
            raise ValueError("affine_state x_cap must be positive")

    @property
    def nondecreasing_in_x(self) -> bool:
        return self.slope >= 0

    def __call__(self, t: ArrayLike, s: ArrayLike, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        val = self.offset + self.slope * np.minimum(x, self.x_cap)
        out = np.maximum(0.0, val) if self.slope < 0 else val
        return np.broadcast_to(out, np.broadcast(np.asarray(t), np.asarray(s), x).shape).copy()

    def default_majorant(self) -> AffineMajorant:
        if self.slope >= 0:
            return AffineMajorant(self.offset + self.slope * self.x_cap)
        return AffineMajorant(self.offset)

    def min_on_domain(self, T: float, x_hi: float) -> float:
        # x ranges over (0, x_hi]; the affine part is monotone in x
        at_zero = self.offset
        at_hi = self.offset + self.slope * min(x_hi, self.x_cap)
        return float(max(0.0, min(at_zero, at_hi)))

    def params(self) -> dict:
        return {"offset": self.offset, "slope": self.slope, "x_cap": self.x_cap}


@dataclass(frozen=True)
class ConstantInTKernel:
    """f(t, s, x) = offset + s_slope*s + x_slope*min(x, x_cap); no t dependence."""

    offset: float
    s_slope: float
    x_slope: float
    x_cap: float
    family = "constant_in_t"
    depends_on_t = False
    nonincreasing_in_t = True
    nondecreasing_in_x = True
    has_state_cap = True

    def __post_init__(self):
        if min(self.offset, self.s_slope, self.x_slope) < 0:
            raise ValueError("constant_in_t coefficients must be nonnegative")
        if self.x_cap <= 0:
            raise ValueError("constant_in_t x_cap must be positive")

    def __call__(self, t: ArrayLike, s: ArrayLike, x: ArrayLike) -> ArrayLike:
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        out = self.offset + self.s_slope * s + self.x_slope * np.minimum(x, self.x_cap)
        return np.broadcast_to(out, np.broadcast(np.asarray(t), s, x).shape).copy()

    def default_majorant(self) -> AffineMajorant:
        return AffineMajorant(self.offset + self.x_slope * self.x_cap, 0.0, self.s_slope)

    def min_on_domain(self, T: float, x_hi: float) -> float:
        return float(self.offset)

    def params(self) -> dict:
        return {
            "offset": self.offset,
            "s_slope": self.s_slope,
            "x_slope": self.x_slope,
            "x_cap": self.x_cap,
        }


_STATE_FACTORS = ("linear", "saturating", "constant")


@dataclass(frozen=True)
class SeparableKernel:
    """f(t, s, x) = (k0 + kt*t + ks*s) * g(x), a product of a time factor and
    a monotone state factor.

    State factors: ``linear`` g(x) = min(x, x_cap); ``saturating``
    g(x) = x / (g0 + x), bounded by one; ``constant`` g(x) = 1.  The time
    factor must stay nonnegative on the problem square, which
    ``Problem`` validates against its horizon.
    """

    k0: float
    kt: float
    ks: float
    state: str
    g0: float = 1.0
    x_cap: float = 1.0
    family = "separable"

    def __post_init__(self):
        if self.state not in _STATE_FACTORS:
            raise ValueError(f"unknown state factor {self.state!r}; use one of {_STATE_FACTORS}")
        if self.state == "saturating" and self.g0 <= 0:
            raise ValueError("saturating state factor needs g0 > 0")
        if self.x_cap <= 0:
            raise ValueError("separable x_cap must be positive")

    @property
    def depends_on_t(self) -> bool:
        return self.kt != 0.0

    @property
    def nonincreasing_in_t(self) -> bool:
        return self.kt <= 0.0

    nondecreasing_in_x = True

    @property
    def has_state_cap(self) -> bool:
        return self.state == "linear"

    def _time_factor(self, t: ArrayLike, s: ArrayLike) -> ArrayLike:
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        return np.maximum(0.0, self.k0 + self.kt * t + self.ks * s)

    def _state_factor(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        if self.state == "linear":
            return np.minimum(x, self.x_cap)
        if self.state == "saturating":
            return x / (self.g0 + x)
        return np.ones_like(x)

    def _state_sup(self) -> float:
        return self.x_cap if self.state == "linear" else 1.0

    def __call__(self, t: ArrayLike, s: ArrayLike, x: ArrayLike) -> ArrayLike:
        out = self._time_factor(t, s) * self._state_factor(x)
        shape = np.broadcast(np.asarray(t), np.asarray(s), np.asarray(x)).shape
        return np.broadcast_to(out, shape).copy()

    def time_factor_min(self, T: float) -> float:
        corners = [self.k0 + self.kt * a + self.ks * b for a in (0.0, T) for b in (0.0, T)]
        return float(min(corners))

    def default_majorant(self) -> AffineMajorant:
        g = self._state_sup()
        return AffineMajorant(self.k0 * g, self.kt * g, self.ks * g)

    def min_on_domain(self, T: float, x_hi: float) -> float:
        k_min = max(0.0, self.time_factor_min(T))
        if self.state == "constant":
            g_min = 1.0
        else:
            g_min = 0.0  # both other factors vanish as x -> 0
        return float(k_min * g_min)

    def params(self) -> dict:
        return {
            "k0": self.k0,
            "kt": self.kt,
            "ks": self.ks,
            "state": self.state,
            "g0": self.g0,
            "x_cap": self.x_cap,
        }


@dataclass(frozen=True)
class PerturbedKernel:
    """base kernel shifted by a signed eps; negative shifts clamp at zero.

    A positive shift is exact: the value is the float sum base + eps with no
    clamping, so Perturbed(base, +eps) - base == eps at every point.
    """

    base: "Kernel"
    eps: float
    family = "perturbed"

    @property
    def depends_on_t(self) -> bool:
        return self.base.depends_on_t

    @property
    def nondecreasing_in_x(self) -> bool:
        return self.base.nondecreasing_in_x

    @property
    def nonincreasing_in_t(self) -> bool:
        return self.base.nonincreasing_in_t

    def __call__(self, t: ArrayLike, s: ArrayLike, x: ArrayLike) -> ArrayLike:
        val = self.base(t, s, x) + self.eps
        if self.eps < 0:
            return np.maximum(0.0, val)
        return val

    def default_majorant(self) -> AffineMajorant:
        m = self.base.default_majorant()
        return dataclasses.replace(m, const=m.const + max(self.eps, 0.0))

    def min_on_domain(self, T: float, x_hi: float) -> float:
        return float(max(0.0, self.base.min_on_domain(T, x_hi) + self.eps))

    def params(self) -> dict:
        return {"base": describe(self.base), "eps": self.eps}


Kernel = Union[ZeroKernel, AffineStateKernel, ConstantInTKernel, SeparableKernel, PerturbedKernel]
Forcing = Union[ConstantForcing, PolynomialForcing, ExpForcing, ReciprocalForcing,
                "ManufacturedForcing"]


# ---------------------------------------------------------------------------
# manufactured forcing: makes a chosen x* an exact solution


@dataclass(frozen=True)
class ManufacturedForcing:
    """Forcing a(t) = x*(t) - Q1(t) * Q2(t).

    Q_i(t) is the composite trapezoid of s -> f_i(t, s, x*(s)) over [0, t]
    with ``oracle_n`` panels laid out fresh for each t.  By construction x*
    then solves the quadratic integral equation up to the oracle quadrature
    error, which shrinks like (t / oracle_n)**2.
    """

    x_star: Forcing
    f1: Kernel
    f2: Kernel
    oracle_n: int
    family = "manufactured"

    def __post_init__(self):
        if self.oracle_n < 1024:
            raise ValueError("manufactured forcing needs oracle_n >= 1024")

    def _inner(self, kernel: Kernel, t: np.ndarray) -> np.ndarray:
        # s grid per row: s_ij = t_i * j / oracle_n
        frac = np.arange(self.oracle_n + 1) / self.oracle_n
        s = t[:, None] * frac[None, :]
        xs = np.asarray(self.x_star(s), dtype=float)
        vals = kernel(t[:, None], s, xs)
        return _row_trapz(s, vals)

    def __call__(self, t: ArrayLike) -> ArrayLike:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        q1 = self._inner(self.f1, t_arr)
        q2 = self._inner(self.f2, t_arr)
        a = np.asarray(self.x_star(t_arr), dtype=float) - q1 * q2
        return a if np.ndim(t) else float(a[0])

    def params(self) -> dict:
        return {
            "x_star": describe(self.x_star),
            "f1": describe(self.f1),
            "f2": describe(self.f2),
            "oracle_n": self.oracle_n,
        }


def _row_trapz(s: np.ndarray, vals: np.ndarray) -> np.ndarray:
    """Trapezoid along the last axis with per-row node spacing."""
    widths = np.diff(s, axis=-1)
    return np.sum(0.5 * (vals[..., :-1] + vals[..., 1:]) * widths, axis=-1)


# ---------------------------------------------------------------------------
# family registry and (de)serialization


def describe(fn) -> dict:
    """Family-plus-parameters description, the serialized form of a catalog fn."""
    return {"family": fn.family, **fn.params()}


_FORCING_FAMILIES = {
    "constant": ConstantForcing,
    "polynomial": PolynomialForcing,
    "exp": ExpForcing,
    "reciprocal": ReciprocalForcing,
}

_KERNEL_FAMILIES = {
    "zero": ZeroKernel,
    "affine_state": AffineStateKernel,
    "constant_in_t": ConstantInTKernel,
    "separable": SeparableKernel,
}


def forcing_from_spec(spec: dict) -> Forcing:
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "manufactured":
        return ManufacturedForcing(
            x_star=forcing_from_spec(spec.pop("x_star")),
            f1=kernel_from_spec(spec.pop("f1")),
            f2=kernel_from_spec(spec.pop("f2")),
            oracle_n=int(spec.pop("oracle_n")),
            **_reject_leftovers("forcing", family, spec),
        )
    if family == "polynomial" and "coeffs" in spec:
        spec["coeffs"] = tuple(spec["coeffs"])
    return _build(_FORCING_FAMILIES, "forcing", family, spec)


def kernel_from_spec(spec: dict) -> Kernel:
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "perturbed":
        return PerturbedKernel(
            base=kernel_from_spec(spec.pop("base")),
            eps=float(spec.pop("eps")),
            **_reject_leftovers("kernel", family, spec),
        )
    return _build(_KERNEL_FAMILIES, "kernel", family, spec)


def majorant_from_spec(spec: dict) -> AffineMajorant:
    spec = dict(spec)
    family = spec.pop("family", None)
    return _build({"affine": AffineMajorant}, "majorant", family, spec)


def _build(registry: dict, kind: str, family, spec: dict):
    if family not in registry:
        known = ", ".join(sorted(registry))
        raise ValueError(f"unknown {kind} family {family!r} (known: {known})")
    try:
        return registry[family](**spec)
    except TypeError as exc:
        raise ValueError(f"{kind} family {family!r}: {exc}") from None


def _reject_leftovers(kind: str, family: str, spec: dict) -> dict:
    if spec:
        raise ValueError(f"{kind} family {family!r}: unexpected parameters {sorted(spec)}")
    return {}
