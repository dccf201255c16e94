"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary
section at the end lists every criterion.
"""
import math

import numpy as np
import pytest

from hypstab import harness
from hypstab.harness import MU_VALUES, TABLES
from hypstab.lyapunov import decay_rates, verify_k_conditions
from hypstab.models import build_system, wave_system
from hypstab.scheme import (FeedbackMatrix, StateField, build_discretization, close_boundaries,
                            diffusion_coefficients, initial_data, step_plain_upwind,
                            step_viscous_upwind)
from hypstab.simulation import recursion_holds

from oracle import update_matrix

ROWS = (100, 200, 400, 800, 1600)

# printed reference values: (sup, l2, eta_T, eta_N, rate) per J
TABLE1 = {
    100: (0.0025, 0.0030, 0.4999, 0.4974, 2.0298),
    200: (0.0013, 0.0016, 0.5000, 0.4987, 2.0391),
    400: (7.2780e-04, 8.9220e-04, 0.5000, 0.4994, 2.0545),
    800: (4.0501e-04, 5.0287e-04, 0.5000, 0.4997, 2.0785),
    1600: (2.2993e-04, 2.9221e-04, 0.5000, 0.4998, 2.1153),
}
TABLE2 = {
    100: (0.0027, 0.0052, 0.4994, 0.4969, 2.0874),
    200: (0.0016, 0.0031, 0.4997, 0.4984, 2.1270),
    400: (0.0010, 0.0019, 0.4998, 0.4992, 2.1922),
    800: (6.2921e-04, 0.0012, 0.4999, 0.4996, 2.3004),
    1600: (4.0021e-04, 7.9843e-04, 0.5000, 0.4998, 2.4773),
}
# (sup, l2, eta_T, eta_N) per mu
TABLE3 = {
    0.25: (1.0106e-04, 1.6670e-04, 0.2500, 0.2500),
    0.5: (2.2993e-04, 2.9221e-04, 0.5000, 0.4998),
    1.25: (7.7158e-04, 7.8381e-04, 1.2500, 1.2490),
    2.75: (0.0048, 0.0034, 2.7499, 2.7452),
    4.5: (0.0291, 0.0165, 4.4997, 4.4870),
}
TABLE4 = {
    0.25: (1.7610e-04, 2.4173e-04, 0.2500, 0.2500),
    0.5: (2.3129e-04, 2.8947e-04, 0.5000, 0.4998),
    1.25: (6.6414e-04, 7.4674e-04, 1.2500, 1.2490),
    2.75: (0.0046, 0.0033, 2.7499, 2.7452),
    4.5: (0.0284, 0.0159, 4.4997, 4.4870),
}
REL = 0.15
RATE_TOL = 0.10


def rel_err(got, want):
    return abs(got - want) / abs(want)


def all_runs(table, figure):
    """Every case result behind the tables and the figures."""
    for t in sorted(TABLES):
        yield from table(t).results.values()
    for f in sorted(harness.FIGURES):
        yield from figure(f).values()


def test_criterion_1_rate_formulas(verdict):
    bad = []
    for tid, ref in ((1, TABLE1), (2, TABLE2), (3, TABLE3), (4, TABLE4)):
        cfg = TABLES[tid]
        for key, vals in ref.items():
            J, mu = (key, cfg.mu[0]) if tid <= 2 else (cfg.J[0], key)
            s = build_system(cfg.model)
            d = build_discretization(s, J, cfg.cfl, mu)
            r = decay_rates(s, d, diffusion_coefficients(s, d))
            eta_t, eta_n = vals[-3:-1] if tid <= 2 else vals[-2:]
            if f"{r.eta_t:.4f}" != f"{eta_t:.4f}" or f"{r.eta_n:.4f}" != f"{eta_n:.4f}":
                bad.append((tid, key, round(r.eta_t, 6), round(r.eta_n, 6)))
    s = wave_system()
    d = build_discretization(s, 100, 0.5, 0.5)
    r = decay_rates(s, d, diffusion_coefficients(s, d))
    exact = math.isclose(r.eta_t, 0.499375, rel_tol=1e-14)
    ok = not bad and exact
    verdict(1, ok, f"eta_T/eta_N of all 20 table rows match to 4 decimals; "
                   f"eta_T(J=100, cfl 0.5) = {r.eta_t!r}" + (f"; mismatches {bad}" if bad else ""))
    assert ok


def _compare_refinement(report, ref):
    worst = {"sup": 0.0, "l2": 0.0, "rate": 0.0}
    for J in ROWS:
        row = report.row(J=J)
        sup, l2, _, _, rate = ref[J]
        worst["sup"] = max(worst["sup"], rel_err(row.sup_diff, sup))
        worst["l2"] = max(worst["l2"], rel_err(row.l2_diff, l2))
        worst["rate"] = max(worst["rate"], abs(row.rate - rate))
    ok = worst["sup"] <= REL and worst["l2"] <= REL and worst["rate"] <= RATE_TOL
    return ok, worst


def test_criterion_2_table1(verdict, table):
    ok, w = _compare_refinement(table(1), TABLE1)
    verdict(2, ok, f"worst sup err {w['sup']:.2%}, l2 err {w['l2']:.2%} (limit 15%), "
                   f"rate dev {w['rate']:.4f} (limit 0.10)")
    assert ok


def test_criterion_3_table2(verdict, table):
    ok, w = _compare_refinement(table(2), TABLE2)
    t1, t2 = table(1), table(2)
    ordered = all(t2.row(J=J).sup_diff >= t1.row(J=J).sup_diff
                  and t2.row(J=J).l2_diff >= t1.row(J=J).l2_diff for J in ROWS)
    ok = ok and ordered
    verdict(3, ok, f"worst sup err {w['sup']:.2%}, l2 err {w['l2']:.2%}, rate dev "
                   f"{w['rate']:.4f}; cfl 0.5 errors >= cfl 0.95 errors: {ordered}")
    assert ok


def test_criterion_4_tables_3_4(verdict, table):
    worst, monotone = 0.0, True
    for tid, ref in ((3, TABLE3), (4, TABLE4)):
        rep = table(tid)
        sups = [rep.row(mu=mu).sup_diff for mu in MU_VALUES]
        monotone &= all(a < b for a, b in zip(sups, sups[1:]))
        for mu in MU_VALUES:
            worst = max(worst, rel_err(rep.row(mu=mu).sup_diff, ref[mu][0]))
    ok = worst <= REL and monotone
    verdict(4, ok, f"worst sup err {worst:.2%} (limit 15%); increasing in mu: {monotone}")
    assert ok


def test_criterion_5_recursion(verdict, table, figure):
    n_runs = n_steps = 0
    failures = []
    for res in all_runs(table, figure):
        v = res.series.values
        holds = recursion_holds(v, res.sim.grid.dt, res.rates.eta_n)
        n_runs += 1
        n_steps += holds.size
        if not holds.all():
            failures.append((harness.case_name(res.config), int(np.argmin(holds)) + 1))
    ok = not failures
    verdict(5, ok, f"L^(n+1) <= (1 - dt eta_N) L^n on {n_steps} steps of {n_runs} runs"
                   + (f"; violated in {failures[:3]}" if failures else ""))
    assert ok


def test_criterion_6_bound_ordering(verdict, figure):
    worst = []
    ok = True
    for fid in (1, 3, 5):
        for (label, mu), res in sorted(figure(fid).items()):
            v = res.series.values
            t = res.series.times
            up = {k: v[0] * np.exp(-getattr(res.rates, k) * t)
                  for k in ("alpha_mu", "eta_t", "eta_n")}
            slack = np.nextafter(up["alpha_mu"], np.inf)
            first = v <= slack
            chain = np.all(up["alpha_mu"] <= up["eta_t"]) and np.all(up["eta_t"] <= up["eta_n"])
            if not (first.all() and chain):
                ok = False
                excess = float(np.max((v - up["alpha_mu"]) / up["alpha_mu"]))
                t_first = float(t[np.argmin(first)])
                worst.append(f"fig{fid} {label} mu={mu:g}: L exceeds L_up(alpha mu) "
                             f"from t={t_first:.2f}, by up to {excess:.3%}")
    verdict(6, ok, "L <= L_up(alpha mu) <= L_up(eta_T) <= L_up(eta_N) at figure 1/3/5 settings"
                   + ("; " + "; ".join(worst) if worst else ""))
    assert ok


def test_criterion_7_k_conditions(verdict):
    worst = 0.0
    for model in ("wave", "euler", "saint-venant"):
        s = build_system(model)
        for mu in MU_VALUES:
            d = build_discretization(s, 200, 0.5, mu)
            rep = verify_k_conditions(FeedbackMatrix.exponential(mu), s, d,
                                      diffusion_coefficients(s, d))
            worst = max(worst, max(r.relative_residual for r in rep.results))
    s = wave_system()
    d = build_discretization(s, 200, 0.5, 0.5)
    pert = verify_k_conditions(FeedbackMatrix.exponential(0.5, 1.01), s, d,
                               diffusion_coefficients(s, d))["20"]
    ok = worst < 1e-12 and pert.relative_residual > 1e-3 and not pert.passed
    verdict(7, ok, f"worst residual {worst:.2e} over 15 cases; 1% perturbed K residual "
                   f"{pert.relative_residual:.2e}")
    assert ok


def test_criterion_8_exact_transport(verdict):
    s = wave_system()
    J = 64
    d = build_discretization(s, J, 1.0, 0.5)
    v = diffusion_coefficients(s, d)
    K = FeedbackMatrix.exponential(0.5)
    a = b = close_boundaries(initial_data("wave", J, d, "perturbed"), K)
    ok = v.eps_plus == 0.0 and v.eps_minus == 0.0
    for _ in range(100):
        na = step_viscous_upwind(a, s, d, v, K)
        nb = step_plain_upwind(b, s, d, K)
        ok &= np.array_equal(na.interior[0], nb.interior[0])
        ok &= np.array_equal(na.interior[1], nb.interior[1])
        ok &= np.array_equal(na.u_plus[2:-1], a.u_plus[1:-2])
        ok &= np.array_equal(na.u_minus[1:-2], a.u_minus[2:-1])
        a, b = close_boundaries(na, K), close_boundaries(nb, K)
    verdict(8, ok, "cfl 1: eps = 0, viscous == plain bitwise, one-cell shift for 100 steps")
    assert ok


def test_criterion_9_dense_oracle(verdict):
    worst = 0.0
    rng = np.random.default_rng(20240611)
    s = wave_system()
    for J in (4, 8):
        d = build_discretization(s, J, 0.5, 0.5)
        v = diffusion_coefficients(s, d)
        K = FeedbackMatrix.exponential(0.5)
        M = update_matrix(J, K.k, s.a_plus, s.a_minus, d.dx, d.dt, v.eps_plus, v.eps_minus)
        for _ in range(10):
            st = StateField(np.r_[0.0, rng.standard_normal(J), 0.0],
                            np.r_[0.0, rng.standard_normal(J), 0.0])
            got = np.r_[step_viscous_upwind(st, s, d, v, K).interior]
            worst = max(worst, float(np.max(np.abs(got - M @ np.r_[st.interior]))))
    ok = worst <= 1e-13
    verdict(9, ok, f"max componentwise deviation {worst:.2e} over 20 random states")
    assert ok


def test_criterion_10_norm_equivalence(verdict, table, figure):
    n_runs = n_steps = 0
    failures = []
    for res in all_runs(table, figure):
        mu = res.config.mu
        v, n2 = res.series.values, res.sim.l2_norms
        ok_run = np.all(math.exp(-mu) * n2 <= v) and np.all(v <= math.exp(mu) * n2)
        n_runs += 1
        n_steps += v.size
        if not ok_run:
            failures.append(harness.case_name(res.config))
    ok = not failures
    verdict(10, ok, f"e^-mu |U|^2 <= L <= e^mu |U|^2 at {n_steps} recorded steps of {n_runs} runs"
                    + (f"; violated in {failures[:3]}" if failures else ""))
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
