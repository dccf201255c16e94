"""Physical models reduced to diagonal 2x2 linear transport.

Each model is described by its two characteristic speeds a+ > 0 > a-
and, for the gas and water models, by the steady state about which the
system is linearised.  Riemann invariants are the affine maps

    U+ = (q - q*) - a- (w - w*),    U- = (q - q*) - a+ (w - w*)

where w is density (Euler) or water height (Saint-Venant).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MODELS = ("wave", "euler", "saint-venant")
INITIAL_VARIANTS = ("model-default", "constant", "perturbed")


class ModelError(ValueError):
    """Invalid model label or a steady state that breaks hyperbolicity."""


@dataclass(frozen=True)
class SystemSpec:
    a_plus: float
    a_minus: float
    label: str = "wave"

    def __post_init__(self):
        if not (self.a_minus < 0.0 < self.a_plus):
            raise ModelError(
                f"speeds must satisfy a- < 0 < a+, got a+={self.a_plus}, a-={self.a_minus}"
            )

    @property
    def alpha(self) -> float:
        """Slowest characteristic speed, min(a+, |a-|)."""
        return min(self.a_plus, abs(self.a_minus))

    @property
    def max_speed(self) -> float:
        return max(self.a_plus, abs(self.a_minus))


@dataclass(frozen=True)
class SteadyState:
    primary_star: float
    flux_star: float
    constant: float


@dataclass(frozen=True)
class RiemannState:
    u_plus: float
    u_minus: float


def wave_system(c: float = 1.0) -> SystemSpec:
    return SystemSpec(c, -c, "wave")


def euler_system(steady: SteadyState) -> SystemSpec:
    """Isothermal gas: speeds q*/rho* +- a, sub-sonic states only."""
    if steady.primary_star <= 0.0 or steady.constant <= 0.0:
        raise ModelError("density and sound speed must be positive")
    u = steady.flux_star / steady.primary_star
    if abs(u) >= steady.constant:
        raise ModelError(
            f"steady state is not sub-sonic: |q*/rho*| = {abs(u)} >= a = {steady.constant}"
        )
    return SystemSpec(u + steady.constant, u - steady.constant, "euler")


def saint_venant_system(steady: SteadyState) -> SystemSpec:
    """Open channel flow: speeds q*/h* +- sqrt(g h*), sub-critical only."""
    if steady.primary_star <= 0.0 or steady.constant <= 0.0:
        raise ModelError("height and gravity must be positive")
    u = steady.flux_star / steady.primary_star
    c = math.sqrt(steady.constant * steady.primary_star)
    if abs(u) >= c:
        raise ModelError(
            f"steady state is not sub-critical: |q*/h*| = {abs(u)} >= sqrt(g h*) = {c}"
        )
    return SystemSpec(u + c, u - c, "saint-venant")


# Reference steady state for each model.
DEFAULT_STEADY = {
    "wave": SteadyState(0.0, 0.0, 1.0),
    "euler": SteadyState(3.0, 0.6, 1.0),
    "saint-venant": SteadyState(4.0, 10.0, 9.8),
}


def build_system(model: str, steady: SteadyState | None = None) -> SystemSpec:
    if model not in MODELS:
        raise ModelError(f"unknown model {model!r}; expected one of {MODELS}")
    steady = steady or DEFAULT_STEADY[model]
    if model == "wave":
        return wave_system(steady.constant)
    if model == "euler":
        return euler_system(steady)
    return saint_venant_system(steady)


def to_riemann(physical, steady: SteadyState, spec: SystemSpec) -> RiemannState:
    w, q = physical
    dw = w - steady.primary_star
    dq = q - steady.flux_star
    return RiemannState(dq - spec.a_minus * dw, dq - spec.a_plus * dw)


def from_riemann(r: RiemannState, steady: SteadyState, spec: SystemSpec):
    # U+ - U- = (a+ - a-) dw, and a+ != a- by hyperbolicity
    dw = (r.u_plus - r.u_minus) / (spec.a_plus - spec.a_minus)
    dq = r.u_plus + spec.a_minus * dw
    return steady.primary_star + dw, steady.flux_star + dq


def cell_centers(J: int, include_ghosts: bool = False) -> np.ndarray:
    """x_j = (j - 1/2) dx for j = 1..J, or j = 0..J+1 with ghosts."""
    dx = 1.0 / J
    j = np.arange(0, J + 2) if include_ghosts else np.arange(1, J + 1)
    return (j - 0.5) * dx


def initial_profiles(model: str, x: np.ndarray, variant: str = "model-default",
                     spec: SystemSpec | None = None,
                     steady: SteadyState | None = None,
                     center: bool = False):
    """Riemann-invariant initial data evaluated at the points ``x``.

    ``variant`` selects the constant or sine-perturbed wave data; for the
    gas and channel models only their own data exists.  The channel data
    adds multiples of the full height, not its deviation from h*;
    ``center`` subtracts the spatial mean.
    """
    if model not in MODELS:
        raise ModelError(f"unknown model {model!r}; expected one of {MODELS}")
    if variant not in INITIAL_VARIANTS:
        raise ModelError(f"unknown initial data {variant!r}; expected one of {INITIAL_VARIANTS}")
    steady = steady or DEFAULT_STEADY[model]
    spec = spec or build_system(model, steady)
    x = np.asarray(x, dtype=float)

    if model == "wave":
        up = np.full_like(x, -0.5)
        um = np.full_like(x, 0.5)
        if variant == "perturbed":
            bump = np.sin(2.0 * np.pi * x) / (4.0 * np.pi)
            up = up + bump
            um = um + bump
    elif variant in ("constant", "perturbed"):
        raise ModelError(f"initial data {variant!r} is only defined for the wave model")
    elif model == "euler":
        # 0.8 e^{-x} - 3 and -1.2 e^{-x} + 3 at the reference state
        decay = np.exp(-x)
        up = -spec.a_minus * decay - steady.primary_star
        um = -spec.a_plus * decay + steady.primary_star
    else:
        height = steady.primary_star + 0.5 * np.sin(np.pi * x)
        up = steady.flux_star - spec.a_minus * height
        um = steady.flux_star - spec.a_plus * height

    if center:
        up = up - up.mean()
        um = um - um.mean()
    return up, um
