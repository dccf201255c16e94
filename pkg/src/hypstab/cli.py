"""Command line entry point: ``python -m hypstab <command> ...``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure
(singular boundary closure or a diverging run).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import harness
from .config import ConfigError, apply_settings, format_config, parse_config
from .harness import ExperimentConfig, HarnessError
from .lyapunov import decay_rates, verify_continuous_k_conditions, verify_k_conditions
from .models import ModelError
from .scheme import ClosureError, FeedbackMatrix, diffusion_coefficients
from .simulation import DivergenceError

log = logging.getLogger("hypstab")

_FLAG_KEYS = ("model", "J", "cfl", "mu", "T", "tol", "scheme", "initial", "out")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--model", help="wave | euler | saint-venant")
    p.add_argument("--J", help="cell count, or a comma separated dyadic list")
    p.add_argument("--cfl", help="Courant number in (0, 1]")
    p.add_argument("--mu", help="Lyapunov weight, or a comma separated list")
    p.add_argument("--T", help="final time")
    p.add_argument("--tol", help="stop once the functional drops below this value")
    p.add_argument("--scheme", help="viscous | plain")
    p.add_argument("--initial", help="constant | perturbed | model-default")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypstab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("simulate", "run cases and write their Lyapunov series and snapshots"),
        ("converge", "grid refinement study over the J list"),
        ("sweep", "one run per mu on a single grid"),
        ("check-k", "check K = diag(e^{-mu/2}) against the dissipativity identities"),
        ("rates", "print alpha*mu, eta_T and eta_N"),
    ]:
        _common(sub.add_parser(name, help=help_))
    p = sub.add_parser("table", help="reproduce one of the comparison tables")
    p.add_argument("table_id", type=int, choices=sorted(harness.TABLES))
    p.add_argument("--out", default="results")
    p.add_argument("--tol", help="stopping tolerance (default 1e-07)")
    p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("figure", help="write the data series behind one of the decay figures")
    p.add_argument("figure_id", type=int, choices=sorted(harness.FIGURES))
    p.add_argument("--out", default="results")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args) -> ExperimentConfig:
    base = ExperimentConfig()
    if getattr(args, "config", None):
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        base = parse_config(text)
    flags = {k: getattr(args, k) for k in _FLAG_KEYS if getattr(args, k, None) is not None}
    return apply_settings(base, flags, {k: f"--{k}: " for k in flags})


class Manifest:
    def __init__(self, out: Path, command: str, config_text: str):
        self.out = Path(out)
        self.command = command
        self.config_text = config_text
        self.files: list[str] = []
        self.cases: list[dict] = []
        self.start = time.perf_counter()

    def add(self, path: Path) -> None:
        self.files.append(str(Path(path)))

    def add_case(self, res) -> None:
        cfg = res.config
        self.cases.append({"model": cfg.model, "J": cfg.J, "cfl": cfg.cfl, "mu": cfg.mu,
                           "steps": len(res.series) - 1, "stop": res.sim.stop_reason,
                           **res.rates.as_dict()})

    def write(self) -> Path:
        path = self.out / "manifest.json"
        self.out.mkdir(parents=True, exist_ok=True)
        data = {"command": self.command, "config": self.config_text,
                "files": self.files, "cases": self.cases,
                "wall_seconds": round(time.perf_counter() - self.start, 3)}
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        return path


def cmd_simulate(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    m = Manifest(out, "simulate", format_config(cfg))
    results = harness.run_cases(cfg.cases(), cfg.functional)
    for key in sorted(results):
        res = results[key]
        name = harness.case_name(res.config)
        m.add(harness.write_series_csv(res, out / f"series_{name}.csv", cfg.functional))
        m.add(harness.write_snapshots_csv(res, out / f"snapshots_{name}.csv"))
        m.add_case(res)
        r = res.rates
        print(f"{name}: {len(res.series) - 1} steps ({res.sim.stop_reason}), "
              f"L0={res.values(cfg.functional)[0]:.6e}, alpha*mu={r.alpha_mu:.4f}, "
              f"eta_T={r.eta_t:.4f}, eta_N={r.eta_n:.4f}")
    print(f"manifest: {m.write()}")
    return 0


def _report(report, out: Path, csv_name: str, command: str, cfg_text: str) -> int:
    m = Manifest(out, command, cfg_text)
    m.add(harness.write_table_csv(report, out / csv_name))
    text = harness.format_report(report)
    (out / "report.txt").write_text(text + "\n", encoding="utf-8")
    m.add(out / "report.txt")
    for key in sorted(report.results):
        m.add_case(report.results[key])
    print(text)
    print(f"manifest: {m.write()}")
    return 0


def cmd_converge(cfg: ExperimentConfig) -> int:
    report = harness.convergence_study(cfg)
    return _report(report, Path(cfg.out), "convergence.csv", "converge", format_config(cfg))


def cmd_table(table_id: int, out: str, tol: str | None) -> int:
    cfg = harness.TABLES[table_id]
    if tol is not None:
        cfg = apply_settings(cfg, {"tol": tol}, {"tol": "--tol: "})
    report = harness.convergence_study(cfg)
    return _report(report, Path(out), f"table{table_id}.csv", f"table {table_id}",
                   format_config(cfg))


def cmd_sweep(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    m = Manifest(out, "sweep", format_config(cfg))
    sweep = harness.mu_sweep(cfg)
    m.add(harness.write_sweep_csv(sweep, out / "sweep.csv", cfg.functional))
    for mu in sorted(sweep):
        res = sweep[mu]
        m.add(harness.write_series_csv(res, out / f"series_{harness.case_name(res.config)}.csv",
                                       cfg.functional))
        m.add_case(res)
        print(f"mu={mu:g}: {len(res.series) - 1} steps, final L={res.values(cfg.functional)[-1]:.6e}")
    print(f"manifest: {m.write()}")
    return 0


def cmd_figure(fig_id: int, out: str) -> int:
    out = Path(out)
    m = Manifest(out, f"figure {fig_id}", "")
    for (label, mu), res in sorted(harness.figure_data(fig_id).items()):
        name = f"fig{fig_id}_{label}_mu{mu:g}"
        m.add(harness.write_series_csv(res, out / f"series_{name}.csv"))
        m.add_case(res)
    print(f"manifest: {m.write()}")
    return 0


def cmd_check_k(cfg: ExperimentConfig) -> int:
    spec = cfg.case(cfg.J[0], cfg.mu[0]).system()
    for J in cfg.J:
        for mu in cfg.mu:
            c = cfg.case(J, mu)
            grid = c.discretization()
            v = diffusion_coefficients(spec, grid)
            K = FeedbackMatrix.exponential(mu)
            print(f"# model={cfg.model} J={J} cfl={cfg.cfl:g} mu={mu:g}")
            print(verify_k_conditions(K, spec, grid, v).to_text())
            print(verify_continuous_k_conditions(K, spec, v.eps_max, mu).to_text())
    return 0


def cmd_rates(cfg: ExperimentConfig) -> int:
    for J in cfg.J:
        for mu in cfg.mu:
            c = cfg.case(J, mu)
            spec, grid = c.system(), c.discretization()
            v = diffusion_coefficients(spec, grid)
            r = decay_rates(spec, grid, v)
            print(f"model={cfg.model} J={J} cfl={cfg.cfl:g} mu={mu:g} "
                  f"eps+={v.eps_plus:.6e} eps-={v.eps_minus:.6e}")
            print(f"alpha*mu={r.alpha_mu:.4f} eta_T={r.eta_t:.4f} eta_N={r.eta_n:.4f} "
                  f"feasible={r.mu_feasible}")
            print(f"  full precision: alpha*mu={r.alpha_mu!r} eta_T={r.eta_t!r} eta_N={r.eta_n!r}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "table":
            return cmd_table(args.table_id, args.out, args.tol)
        if args.command == "figure":
            return cmd_figure(args.figure_id, args.out)
        cfg = resolve_config(args)
        return {"simulate": cmd_simulate, "converge": cmd_converge, "sweep": cmd_sweep,
                "check-k": cmd_check_k, "rates": cmd_rates}[args.command](cfg)
    except (ConfigError, HarnessError, ModelError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (ClosureError, DivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
