"""Time integration of one case, recording the Lyapunov functional."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lyapunov import LyapunovSeries, LyapunovWeights, lyapunov_pair
from .models import DEFAULT_STEADY, SteadyState, SystemSpec, build_system
from .scheme import (Discretization, FeedbackMatrix, StateField, Stepper,
                     build_discretization, initial_data)

DIVERGENCE_FACTOR = 1e6


class DivergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CaseConfig:
    model: str = "wave"
    J: int = 200
    cfl: float = 0.5
    mu: float = 0.5
    T: float = 12.0
    tol: float = 1e-7
    initial: str = "model-default"
    scheme: str = "viscous"
    steady: SteadyState | None = None
    center_initial_data: bool = False
    # functional used for the stopping test: "ghost" or "interior"
    stop_on: str = "ghost"
    snapshot_every: int = 0
    k_scale: float = 1.0

    @property
    def key(self) -> tuple:
        return (self.model, self.initial, self.scheme, self.cfl, self.mu, self.J, self.T)

    def system(self) -> SystemSpec:
        return build_system(self.model, self.steady_state)

    @property
    def steady_state(self) -> SteadyState:
        return self.steady or DEFAULT_STEADY[self.model]

    def discretization(self) -> Discretization:
        return build_discretization(self.system(), self.J, self.cfl, self.mu)

    def feedback(self) -> FeedbackMatrix:
        return FeedbackMatrix.exponential(self.mu, self.k_scale)


@dataclass
class SimulationResult:
    config: CaseConfig
    spec: SystemSpec
    grid: Discretization
    series: LyapunovSeries
    snapshots: list = field(default_factory=list)
    l2_norms: np.ndarray | None = None
    stop_reason: str = "time"

    @property
    def final(self) -> StateField:
        return self.snapshots[-1][1]


def step_count(T: float, dt: float) -> int:
    """Index of the first t^n = n dt with t^n >= T."""
    return max(0, math.ceil(T / dt - 1e-9))


def simulate(cfg: CaseConfig, record_norms: bool = False) -> SimulationResult:
    """Advance until t^n >= T or the functional drops below ``tol``."""
    if cfg.stop_on not in ("ghost", "interior"):
        raise ValueError(f"unknown stop functional {cfg.stop_on!r}")
    spec = cfg.system()
    grid = cfg.discretization()
    state = initial_data(cfg.model, cfg.J, grid, cfg.initial, spec=spec,
                         steady=cfg.steady_state, center=cfg.center_initial_data)
    stepper = Stepper(state, spec, grid, cfg.feedback(), cfg.scheme)
    w = LyapunovWeights.for_grid(cfg.J, cfg.mu)
    dx = grid.dx

    n_max = step_count(cfg.T, grid.dt)
    interior = np.empty(n_max + 1)
    ghost = np.empty(n_max + 1)
    norms = np.empty(n_max + 1) if record_norms else None
    use_ghost = cfg.stop_on == "ghost"
    snapshots = [(0.0, stepper.current.copy())]

    cur = stepper.current
    n = 0
    reason = "time"
    while True:
        li, lg = lyapunov_pair(cur, w, dx)
        interior[n] = li
        ghost[n] = lg
        if record_norms:
            up, um = cur.u_plus[1:-1], cur.u_minus[1:-1]
            norms[n] = dx * float(np.dot(up, up) + np.dot(um, um))
        watched = lg if use_ghost else li
        if n == 0:
            l0 = watched
        elif watched > DIVERGENCE_FACTOR * l0:
            raise DivergenceError(f"functional grew from {l0:g} to {watched:g} by step {n}")
        if watched < cfg.tol:
            reason = "tolerance"
            break
        if n >= n_max:
            break
        cur = stepper.step()
        n += 1
        if cfg.snapshot_every and n % cfg.snapshot_every == 0:
            snapshots.append((n * grid.dt, cur.copy()))

    if snapshots[-1][1].time_index != n:
        snapshots.append((n * grid.dt, cur.copy()))
    times = np.arange(n + 1) * grid.dt
    meta = {"model": cfg.model, "J": cfg.J, "cfl": cfg.cfl, "mu": cfg.mu,
            "dt": grid.dt, "dx": grid.dx, "scheme": cfg.scheme, "initial": cfg.initial}
    series = LyapunovSeries(times, interior[: n + 1].copy(), ghost[: n + 1].copy(), meta)
    return SimulationResult(cfg, spec, grid, series, snapshots,
                            norms[: n + 1].copy() if record_norms else None, reason)


def recursion_holds(values: np.ndarray, dt: float, eta_n: float) -> np.ndarray:
    """Per-step test of L^{n+1} <= (1 - dt eta_N) L^n with one ulp of slack."""
    values = np.asarray(values, dtype=float)
    bound = (1.0 - dt * eta_n) * values[:-1]
    return values[1:] <= np.nextafter(bound, np.inf)
