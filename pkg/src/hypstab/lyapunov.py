"""Weighted discrete Lyapunov functional, decay rates and conditions on K.

The functional is

    L^n = dx * sum_j [ (U+_j)^2 e^{-mu x_j} + (U-_j)^2 e^{mu x_j} ],

summed over the interior cells j = 1..J.  The variant with the two ghost
cells j = 0 and j = J+1 added is what the convergence tables are built
from; both are recorded along every run.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .models import SystemSpec, cell_centers
from .scheme import Discretization, FeedbackMatrix, StateField, ViscosityCoeffs

CONDITION_RTOL = 1e-12


@dataclass(frozen=True)
class LyapunovWeights:
    """e^{-mu x_j} and e^{mu x_j} for j = 0..J+1."""

    p_plus: np.ndarray
    p_minus: np.ndarray
    mu: float

    @classmethod
    def for_grid(cls, J: int, mu: float) -> "LyapunovWeights":
        return _weights(int(J), float(mu))


@functools.lru_cache(maxsize=64)
def _weights(J: int, mu: float) -> LyapunovWeights:
    x = cell_centers(J, include_ghosts=True)
    p_plus = np.exp(-mu * x)
    p_minus = np.exp(mu * x)
    p_plus.setflags(write=False)
    p_minus.setflags(write=False)
    return LyapunovWeights(p_plus, p_minus, mu)


@dataclass(frozen=True)
class DecayRates:
    alpha_mu: float
    eta_t: float
    eta_n: float
    mu_feasible: bool

    def as_dict(self) -> dict:
        return {"alpha_mu": self.alpha_mu, "eta_T": self.eta_t,
                "eta_N": self.eta_n, "mu_feasible": self.mu_feasible}


@dataclass
class LyapunovSeries:
    times: np.ndarray
    values: np.ndarray
    ghost_values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def functional(self, which: str = "ghost") -> np.ndarray:
        if which == "ghost":
            return self.ghost_values
        if which == "interior":
            return self.values
        raise ValueError(f"unknown functional {which!r}; expected 'ghost' or 'interior'")


def discrete_lyapunov(state: StateField, w: LyapunovWeights, d: Discretization,
                      include_ghosts: bool = False) -> float:
    up, um = state.u_plus, state.u_minus
    sl = slice(None) if include_ghosts else slice(1, -1)
    return d.dx * float(np.dot(up[sl] * up[sl], w.p_plus[sl])
                        + np.dot(um[sl] * um[sl], w.p_minus[sl]))


def lyapunov_pair(state: StateField, w: LyapunovWeights, dx: float):
    """Interior and ghost-inclusive functionals in one pass."""
    up, um = state.u_plus, state.u_minus
    ip, im = up[1:-1], um[1:-1]
    interior = np.dot(ip, ip * w.p_plus[1:-1]) + np.dot(im, im * w.p_minus[1:-1])
    edges = (up[0] * up[0] * w.p_plus[0] + up[-1] * up[-1] * w.p_plus[-1]
             + um[0] * um[0] * w.p_minus[0] + um[-1] * um[-1] * w.p_minus[-1])
    return dx * float(interior), dx * float(interior + edges)


def discrete_l2_norm(state: StateField, d: Discretization) -> float:
    up, um = state.interior
    return math.sqrt(d.dx * float(np.dot(up, up) + np.dot(um, um)))


def decay_rates(spec: SystemSpec, d: Discretization, v: ViscosityCoeffs) -> DecayRates:
    """alpha*mu, eta_T = alpha mu - eps mu^2 and eta_N = alpha mu e^{-mu dx} - eps mu^2."""
    if not d.mu > 0.0:
        raise ValueError(f"mu must be positive, got {d.mu}")
    alpha, eps, mu = spec.alpha, v.eps_max, d.mu
    eta_t = alpha * mu - eps * mu**2
    eta_n = alpha * mu * math.exp(-mu * d.dx) - eps * mu**2
    feasible = eps == 0.0 or mu * math.exp(mu * d.dx) <= alpha / eps
    return DecayRates(alpha * mu, eta_t, eta_n, bool(feasible))


def upper_bound_series(l0: float, rate: float, times) -> np.ndarray:
    if l0 < 0.0:
        raise ValueError(f"initial functional must be non-negative, got {l0}")
    return l0 * np.exp(-rate * np.asarray(times, dtype=float))


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.lhs - self.rhs)))

    @property
    def scale(self) -> float:
        return float(max(np.max(np.abs(self.lhs)), np.max(np.abs(self.rhs))))

    @property
    def relative_residual(self) -> float:
        # both sides zero: the condition is void and holds
        return 0.0 if self.scale == 0.0 else self.residual / self.scale

    @property
    def passed(self) -> bool:
        return self.relative_residual < CONDITION_RTOL

    def rows(self):
        for i in range(2):
            for j in range(2):
                yield {"condition": self.condition, "entry": f"{i + 1}{j + 1}",
                       "lhs": float(self.lhs[i, j]), "rhs": float(self.rhs[i, j]),
                       "residual": float(abs(self.lhs[i, j] - self.rhs[i, j])),
                       "pass": self.passed}


@dataclass(frozen=True)
class ConditionReport:
    results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, condition: str) -> ConditionResult:
        for r in self.results:
            if r.condition == condition:
                return r
        raise KeyError(condition)

    def rows(self):
        for r in self.results:
            yield from r.rows()

    def to_text(self) -> str:
        lines = ["condition,entry,lhs,rhs,residual,pass"]
        for row in self.rows():
            lines.append(f"{row['condition']},{row['entry']},{row['lhs']:.16e},"
                         f"{row['rhs']:.16e},{row['residual']:.3e},{row['pass']}")
        for r in self.results:
            lines.append(f"# {r.condition}: relative residual {r.relative_residual:.3e} "
                         f"{'PASS' if r.passed else 'FAIL'}")
        return "\n".join(lines)


def _sandwich(K: FeedbackMatrix, diag) -> np.ndarray:
    k = K.k
    return k.T @ np.diag(diag) @ k


def verify_k_conditions(K: FeedbackMatrix, spec: SystemSpec, d: Discretization,
                        v: ViscosityCoeffs) -> ConditionReport:
    """Evaluate both sides of the three discrete dissipativity identities."""
    mu, dx = d.mu, d.dx
    x0, x1, xJ, xJ1 = -0.5 * dx, 0.5 * dx, 1.0 - 0.5 * dx, 1.0 + 0.5 * dx
    ap, am = spec.a_plus, abs(spec.a_minus)
    sp, sm = v.eps_plus / dx, v.eps_minus / dx
    shrink = (math.exp(-mu * dx) - 1.0) * math.exp(mu * dx)
    cp = ap + sp * shrink
    cm = am + sm * shrink
    e = math.exp

    values = ConditionResult(
        "20",
        _sandwich(K, [cp * e(-mu * x1), cm * e(mu * xJ)]),
        np.diag([cp * e(-mu * xJ1), cm * e(mu * x0)]))
    fluxes = ConditionResult(
        "21",
        _sandwich(K, [sp * e(-mu * x0), -sm * e(mu * xJ1)]),
        np.diag([sp * e(-mu * xJ), -sm * e(mu * x1)]))
    gp = sp * (ap + 2.0 * sp)
    gm = sm * (am + 2.0 * sm)
    gradients = ConditionResult(
        "22",
        _sandwich(K, [gp * e(-mu * x0), -gm * e(mu * xJ1)]),
        np.diag([gp * e(-mu * xJ), -gm * e(mu * x1)]))
    return ConditionReport((values, fluxes, gradients))


def verify_continuous_k_conditions(K: FeedbackMatrix, spec: SystemSpec, eps: float,
                                   mu: float) -> ConditionReport:
    ap = spec.a_plus - eps * mu
    am = abs(spec.a_minus) - eps * mu
    em = math.exp(mu)
    first = ConditionResult("10", _sandwich(K, [ap, am * em]),
                            np.diag([ap / em, am]))
    second = ConditionResult("11", _sandwich(K, [1.0, -em]),
                             np.diag([1.0 / em, -1.0]))
    return ConditionReport((first, second))
