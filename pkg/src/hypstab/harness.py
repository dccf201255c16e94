"""Refinement studies, mu sweeps and the reference comparison tables.

Every case is an independent :func:`~hypstab.simulation.simulate` call;
cases are farmed out to a process pool whose size is capped by the
``HYPSTAB_THREADS`` environment variable.  Results are always assembled
in sorted case order so output files do not depend on scheduling.
"""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .lyapunov import DecayRates, decay_rates, upper_bound_series
from .models import MODELS, SteadyState
from .scheme import diffusion_coefficients
from .simulation import CaseConfig, SimulationResult, simulate

log = logging.getLogger(__name__)

BOUND_NAMES = ("alpha_mu", "eta_T", "eta_N")


class HarnessError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "wave"
    J: tuple = (200,)
    cfl: float = 0.5
    mu: tuple = (0.5,)
    T: float = 12.0
    tol: float = 1e-7
    initial: str = "model-default"
    scheme: str = "viscous"
    out: str = "results"
    steady: SteadyState | None = None
    center_initial_data: bool = False
    # which functional the comparison columns are built from
    functional: str = "ghost"
    # temporal quadrature weight of the L2 difference: "dx", "dt" or "none"
    quadrature: str = "dx"
    # J values shown as table rows; None shows every J
    rows: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(int(j) for j in np.atleast_1d(self.J)))
        object.__setattr__(self, "mu", tuple(float(m) for m in np.atleast_1d(self.mu)))
        if self.model not in MODELS:
            raise HarnessError(f"unknown model {self.model!r}")
        if not self.J:
            raise HarnessError("J list is empty")
        for a, b in zip(self.J, self.J[1:]):
            if b != 2 * a:
                raise HarnessError(f"J list must be dyadic (each entry double the last): {self.J}")
        if self.functional not in ("ghost", "interior"):
            raise HarnessError(f"unknown functional {self.functional!r}")
        if self.quadrature not in ("dx", "dt", "none"):
            raise HarnessError(f"unknown quadrature {self.quadrature!r}")

    def case(self, J: int, mu: float) -> CaseConfig:
        return CaseConfig(model=self.model, J=J, cfl=self.cfl, mu=mu, T=self.T, tol=self.tol,
                          initial=self.initial, scheme=self.scheme, steady=self.steady,
                          center_initial_data=self.center_initial_data,
                          stop_on=self.functional)

    def cases(self) -> list[CaseConfig]:
        return [self.case(J, mu) for mu in self.mu for J in self.J]


@dataclass
class CaseResult:
    sim: SimulationResult
    rates: DecayRates
    bounds: dict

    @property
    def config(self) -> CaseConfig:
        return self.sim.config

    @property
    def series(self):
        return self.sim.series

    def values(self, functional: str = "ghost") -> np.ndarray:
        return self.sim.series.functional(functional)


@dataclass
class ConvergenceRow:
    J: int
    mu: float
    sup_diff: float
    l2_diff: float
    alpha_mu: float
    eta_t: float
    eta_n: float
    rate: float | None
    mu_feasible: bool


@dataclass
class ConvergenceReport:
    rows: list
    config: ExperimentConfig
    results: dict = field(default_factory=dict, repr=False)

    def row(self, J: int | None = None, mu: float | None = None) -> ConvergenceRow:
        for r in self.rows:
            if (J is None or r.J == J) and (mu is None or math.isclose(r.mu, mu)):
                return r
        raise KeyError((J, mu))


def worker_count(n_jobs: int) -> int:
    cap = os.environ.get("HYPSTAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise HarnessError(f"HYPSTAB_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(n, n_jobs))


def run_case(cfg: CaseConfig, functional: str = "ghost") -> CaseResult:
    """Simulate one case and evaluate the three exponential envelopes on its time stamps."""
    sim = simulate(cfg, record_norms=True)
    rates = decay_rates(sim.spec, sim.grid, diffusion_coefficients(sim.spec, sim.grid))
    values = sim.series.functional(functional)
    l0 = float(values[0])
    t = sim.series.times
    bounds = {
        "alpha_mu": upper_bound_series(l0, rates.alpha_mu, t),
        "eta_T": upper_bound_series(l0, rates.eta_t, t),
        "eta_N": upper_bound_series(l0, rates.eta_n, t),
    }
    return CaseResult(sim, rates, bounds)


def _run_case_args(args):
    return run_case(*args)


def run_cases(cases, functional: str = "ghost") -> dict:
    """Run independent cases, returning a dict keyed and ordered by case key."""
    cases = sorted(set(cases), key=lambda c: c.key)
    workers = worker_count(len(cases))
    log.info("running %d case(s) on %d worker(s)", len(cases), workers)
    jobs = [(c, functional) for c in cases]
    if workers == 1:
        results = [_run_case_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case_args, jobs))
    return {c.key: r for c, r in zip(cases, results)}


def diff_norms(series, bound, functional: str = "ghost", quadrature: str = "dx"):
    """Sup and discrete L2 distance between the functional and an envelope.

    ``quadrature`` picks the weight of the L2 sum over time levels: the
    spatial step ("dx"), the time step ("dt") or none.
    """
    values = series.functional(functional) if hasattr(series, "functional") else np.asarray(series)
    bound = np.asarray(bound, dtype=float)
    if values.shape != bound.shape:
        raise HarnessError(f"length mismatch: {values.shape} vs {bound.shape}")
    diff = np.abs(bound - values)
    if quadrature == "none":
        weight = 1.0
    elif hasattr(series, "meta"):
        weight = series.meta[quadrature]
    else:
        raise HarnessError("a quadrature weight needs a series carrying dx/dt metadata")
    return float(diff.max(initial=0.0)), math.sqrt(weight * float(np.dot(diff, diff)))


def refinement_rate(coarse, mid, fine, functional: str = "ghost") -> float:
    """||L_J - L_2J|| / ||L_2J - L_4J|| on the coarse time levels.

    Level n of the coarse run is level 2n of the middle run and 4n of the
    fine one.  Returns NaN when the denominator vanishes.
    """
    runs = (coarse, mid, fine)
    Js = [s.meta["J"] for s in runs]
    if Js[1] != 2 * Js[0] or Js[2] != 4 * Js[0]:
        raise HarnessError(f"refinement needs J, 2J, 4J; got {Js}")
    dts = [s.meta["dt"] for s in runs]
    for f, dt in ((2, dts[1]), (4, dts[2])):
        if not math.isclose(f * dt, dts[0], rel_tol=1e-12):
            raise HarnessError(f"time grids do not nest: dt = {dts}")
    v = [s.functional(functional) for s in runs]
    m = min(len(v[0]), (len(v[1]) - 1) // 2 + 1, (len(v[2]) - 1) // 4 + 1)
    a, b, c = v[0][:m], v[1][: 2 * m : 2], v[2][: 4 * m : 4]
    num = np.linalg.norm(a - b)
    den = np.linalg.norm(b - c)
    if den == 0.0:
        return math.nan
    return float(num / den)


def convergence_study(cfg: ExperimentConfig) -> ConvergenceReport:
    results = run_cases(cfg.cases(), cfg.functional)
    shown = cfg.rows if cfg.rows is not None else cfg.J
    rows = []
    for mu in cfg.mu:
        for i, J in enumerate(cfg.J):
            if J not in shown:
                continue
            res = results[cfg.case(J, mu).key]
            sup, l2 = diff_norms(res.series, res.bounds["eta_N"], cfg.functional, cfg.quadrature)
            rate = None
            if i + 2 < len(cfg.J):
                rate = refinement_rate(res.series,
                                       results[cfg.case(cfg.J[i + 1], mu).key].series,
                                       results[cfg.case(cfg.J[i + 2], mu).key].series,
                                       cfg.functional)
                if math.isnan(rate):
                    rate = None
            r = res.rates
            rows.append(ConvergenceRow(J, mu, sup, l2, r.alpha_mu, r.eta_t, r.eta_n, rate,
                                       r.mu_feasible))
    return ConvergenceReport(rows, cfg, results)


MU_VALUES = (0.25, 0.5, 1.25, 2.75, 4.5)

TABLES = {
    1: ExperimentConfig(model="wave", J=(100, 200, 400, 800, 1600, 3200, 6400), cfl=0.95,
                        mu=(0.5,), T=12.0, initial="constant",
                        rows=(100, 200, 400, 800, 1600)),
    2: ExperimentConfig(model="wave", J=(100, 200, 400, 800, 1600, 3200, 6400), cfl=0.5,
                        mu=(0.5,), T=12.0, initial="constant",
                        rows=(100, 200, 400, 800, 1600)),
    3: ExperimentConfig(model="wave", J=(1600,), cfl=0.95, mu=MU_VALUES, T=35.0,
                        initial="constant"),
    4: ExperimentConfig(model="wave", J=(1600,), cfl=0.95, mu=MU_VALUES, T=35.0,
                        initial="perturbed"),
}

# figure id -> list of (label, config); every panel uses dx = 1/200 and CFL 0.5
FIGURES = {
    1: [("constant", ExperimentConfig(model="wave", J=(200,), mu=(0.5,), T=35.0, initial="constant")),
        ("perturbed", ExperimentConfig(model="wave", J=(200,), mu=(0.5,), T=35.0, initial="perturbed"))],
    2: [("constant", ExperimentConfig(model="wave", J=(200,), mu=MU_VALUES, T=70.0, initial="constant")),
        ("perturbed", ExperimentConfig(model="wave", J=(200,), mu=MU_VALUES, T=70.0, initial="perturbed"))],
    3: [("euler", ExperimentConfig(model="euler", J=(200,), mu=(0.5,), T=45.0))],
    4: [("euler", ExperimentConfig(model="euler", J=(200,), mu=MU_VALUES, T=90.0))],
    5: [("saint-venant", ExperimentConfig(model="saint-venant", J=(200,), mu=(0.5,), T=14.0))],
    6: [("saint-venant", ExperimentConfig(model="saint-venant", J=(200,), mu=MU_VALUES, T=14.0))],
}


def reproduce_table(table_id: int, **overrides) -> ConvergenceReport:
    if table_id not in TABLES:
        raise HarnessError(f"unknown table {table_id}; expected one of {sorted(TABLES)}")
    cfg = TABLES[table_id]
    if overrides:
        cfg = replace(cfg, **overrides)
    return convergence_study(cfg)


def mu_sweep(cfg: ExperimentConfig) -> dict:
    """One case per mu on a single grid; returns {mu: CaseResult}."""
    if len(cfg.J) != 1:
        raise HarnessError(f"a mu sweep runs on one grid, got J = {cfg.J}")
    results = run_cases(cfg.cases(), cfg.functional)
    return {mu: results[cfg.case(cfg.J[0], mu).key] for mu in cfg.mu}


def figure_data(fig_id: int) -> dict:
    """{(panel label, mu): CaseResult} for one of the decay figures."""
    if fig_id not in FIGURES:
        raise HarnessError(f"unknown figure {fig_id}; expected one of {sorted(FIGURES)}")
    out = {}
    for label, cfg in FIGURES[fig_id]:
        for mu, res in mu_sweep(cfg).items():
            out[(label, mu)] = res
    return out


# ---- file output ----------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12e}"


def case_name(cfg: CaseConfig) -> str:
    return f"{cfg.model}_{cfg.initial}_{cfg.scheme}_J{cfg.J}_cfl{cfg.cfl:g}_mu{cfg.mu:g}"


def write_series_csv(result: CaseResult, path: Path, functional: str = "ghost") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    s = result.series
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "L", "L_up_alpha_mu", "L_up_eta_T", "L_up_eta_N", "L_interior"])
        for row in zip(s.times, s.functional(functional), result.bounds["alpha_mu"],
                       result.bounds["eta_T"], result.bounds["eta_N"], s.values):
            w.writerow([_fmt(v) for v in row])
    return path


def write_snapshots_csv(result: CaseResult, path: Path) -> Path:
    """Long format: one line per (snapshot, cell), ghosts excluded."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x = result.sim.grid.x
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x_j", "u_plus", "u_minus"])
        for t, state in result.sim.snapshots:
            up, um = state.interior
            for xj, a, b in zip(x, up, um):
                w.writerow([_fmt(t), _fmt(xj), _fmt(a), _fmt(b)])
    return path


def write_sweep_csv(sweep: dict, path: Path, functional: str = "ghost") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mu", "t", "L", "L_interior"])
        for mu in sorted(sweep):
            s = sweep[mu].series
            for t, v, vi in zip(s.times, s.functional(functional), s.values):
                w.writerow([_fmt(mu), _fmt(t), _fmt(v), _fmt(vi)])
    return path


def write_table_csv(report: ConvergenceReport, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    by_mu = len(report.config.mu) > 1
    head = ["mu" if by_mu else "J", "sup_diff", "l2_diff", "alpha_mu", "eta_T", "eta_N"]
    if not by_mu:
        head.append("rate")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(head)
        for r in report.rows:
            row = [_fmt(r.mu) if by_mu else str(r.J), _fmt(r.sup_diff), _fmt(r.l2_diff),
                   _fmt(r.alpha_mu), _fmt(r.eta_t), _fmt(r.eta_n)]
            if not by_mu:
                row.append(_fmt(r.rate))
            w.writerow(row)
    return path


def _short(x: float) -> str:
    # compact view: 4 decimals, or 4-digit mantissa below 1e-3
    if x is None:
        return "-"
    return f"{x:.4e}" if abs(x) < 1e-3 and x != 0 else f"{x:.4f}"


def format_report(report: ConvergenceReport) -> str:
    by_mu = len(report.config.mu) > 1
    head = f"{'mu' if by_mu else 'J':>6} {'sup':>11} {'l2':>11} {'alpha*mu':>8} {'eta_T':>7} {'eta_N':>7}"
    if not by_mu:
        head += f" {'rate':>7}"
    lines = [head]
    for r in report.rows:
        key = f"{r.mu:>6g}" if by_mu else f"{r.J:>6d}"
        line = (f"{key} {_short(r.sup_diff):>11} {_short(r.l2_diff):>11} {r.alpha_mu:>8.4g} "
                f"{r.eta_t:>7.4f} {r.eta_n:>7.4f}")
        if not by_mu:
            line += f" {_short(r.rate):>7}"
        lines.append(line)
    return "\n".join(lines)
