"""Exit criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, shown in the terminal summary, and
then asserts. Thresholds are not tuned to make a criterion pass.
"""
import numpy as np
import pytest

from chainstab.analysis import OracleParams, fig2_steps, oracle_series, validity_window
from chainstab.controllers import make_controller
from chainstab.core import SimulationConfig
from chainstab.disturbances import (
    RAMP_WINDOWED, AmplitudeBudget, DisturbanceProfile, admissible_alpha, disturbance_norm,
)
from chainstab.harness.config import parse_config
from chainstab.harness.runs import emit_fig_data, run_sweep, verify_lemma
from chainstab.harness.simulate import simulate
from chainstab.properties import CHECKS, run_suite

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

DT = 0.1
CONTROLLERS = {
    "zero": {},
    "pd_asymmetric": {"a": 1, "b1": 2, "b2": 0.5},
    "pd_symmetric": {"a": 1, "b": 1},
    "nonlinear_comm": {"kappa": 1, "sat_limit": 0.5},
}


def record(number, title, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def experiment(name, sizes, budget, horizon="lemma-window"):
    return parse_config({
        "schema_version": "1",
        "sim": {"N_list": list(sizes), "dt": DT, "horizon": horizon},
        "controller": {"name": name, "params": CONTROLLERS[name]},
        "disturbance": {"kind": "ramp-windowed", "budget": budget, "T": "lemma-window"},
        "criterion": budget,
    })


def test_1_closed_form_for_every_controller():
    worst, points = 0.0, 0
    for name in CONTROLLERS:
        report = verify_lemma(experiment(name, (10, 50, 200), {"definition_id": 4}), 1e-9)
        for res in report["results"].values():
            worst = max(worst, res["max_relative_deviation"])
            points += res["points"]
    ok = worst <= 1e-9 and points > 0
    record(1, "closed-form equivalence, 4 controllers x N in {10,50,200}", ok,
           f"max relative deviation {worst:.3e} over {points} (k,t) pairs, tol 1e-9")
    assert ok


def test_2_first_step_closed_form():
    alpha, worst = 1.0, 0.0
    for name in CONTROLLERS:
        for N in (10, 50, 200):
            ctrl = make_controller(name, CONTROLLERS[name], DT)
            traj = simulate(ctrl, DisturbanceProfile(RAMP_WINDOWED, alpha, DT), SimulationConfig(N, DT, 1))
            interior = np.arange(ctrl.m1 + 1, N - ctrl.m2)
            e, edot = np.abs(traj.e[1, interior - 1]), np.abs(traj.edot[1, interior - 1])
            worst = max(worst,
                        float(np.max(np.abs(e - alpha * DT**2 / N)) / (alpha * DT**2 / N)),
                        float(np.max(np.abs(edot - alpha * DT / N)) / (alpha * DT / N)))
    ok = worst <= 1e-12
    record(2, "one-step values a dt^2/N and a dt/N at interior vehicles", ok,
           f"max relative deviation {worst:.3e} (rounding only), tol 1e-12")
    assert ok


SWEEPS = [
    ("def 1 p=q=2", {"definition_id": 1, "p": 2, "q": 2}, 1.0),
    ("def 2 p=q=2", {"definition_id": 2, "p": 2, "q": 2}, 2.0),
    ("def 3 p=2", {"definition_id": 3, "p": 2, "q": 2}, 2.0),
    ("def 4", {"definition_id": 4}, 1.0),
    ("def 1 p=2 q=1", {"definition_id": 1, "p": 2, "q": 1}, 0.0),
]


def test_3_growth_exponents():
    parts, ok = [], True
    for label, budget, expected in SWEEPS:
        report = run_sweep(experiment("pd_asymmetric", (40, 80, 160, 320), budget), oracle_only=True)
        fitted = report["scaling_report"]["fitted_exponent"]
        good = abs(fitted - expected) <= 0.15
        ok &= good
        parts.append(f"{label}: {fitted:.4f} vs {expected:g} {'ok' if good else 'OUT'}")
    cross = 0.0
    for name in CONTROLLERS:
        for _, budget, _ in SWEEPS:
            report = run_sweep(experiment(name, (40, 80, 160), budget), oracle_only=False)
            cross = max(cross, report["simulation_vs_oracle_max_relative"])
    ok &= cross <= 1e-9
    parts.append(f"simulation vs oracle (N<=160, 4 controllers) {cross:.2e}")
    record(3, "growth exponents within 0.15, N in {40,80,160,320}", ok, "; ".join(parts))
    assert ok


MATRIX = [(1, 1, 1), (1, 2, 1), (1, 2, 2), (1, 3, 2), (2, 1, 2), (2, 2, 2), (2, 3, 3),
          (3, 1, 1), (3, 2, 1), (3, 3, 1), (4, 1, 1)]


def test_4_budget_tightness():
    worst = 0.0
    for crit in MATRIX:
        for N in (10, 40, 160):
            for n_T in (1, 5, 20):
                budget = AmplitudeBudget(*crit, C1=1.7)
                alpha = admissible_alpha(budget, N, n_T * DT, DT)
                norm = disturbance_norm(DisturbanceProfile(RAMP_WINDOWED, alpha, n_T * DT), budget, N, DT, n_T + 1)
                worst = max(worst, abs(norm - 1.7) / 1.7)
    closed = 0.0
    for N, n_T in ((10, 2), (50, 12), (320, 80)):
        alpha = 0.9
        norm = disturbance_norm(DisturbanceProfile(RAMP_WINDOWED, alpha, n_T * DT), AmplitudeBudget(1, 2, 2),
                                N, DT, n_T + 1)
        # the window t = 0..T holds n_T + 1 samples, each weighted by dt
        span = (n_T + 1) * DT
        expr = 2 * span * (alpha / N) ** 2 * sum(k * k for k in range(N + 1))
        closed = max(closed, abs(norm - expr) / expr)
    ok = worst <= 1e-12 and closed <= 1e-12
    record(4, "budget tightness and closed norm expression", ok,
           f"tightness {worst:.2e} over {len(MATRIX) * 9} cases; expression {closed:.2e} "
           "(duration read as (T/dt + 1) dt); tol 1e-12")
    assert ok


def test_5_short_window_figure():
    parts, ok = [], True
    for N in (10, 50):
        data = emit_fig_data("fig2", N)
        n_T = fig2_steps(N)
        mask = data["in_window"]
        oracle = data["oracle_e"]
        dev = 0.0
        for n in range(1, n_T + 1):
            cols = mask[n]
            dev = max(dev, float(np.max(np.abs(data["e"][n, cols] - oracle[n]) / abs(oracle[n]))))
        count = len(validity_window(OracleParams(1.0, N, DT), n_T * DT))
        need = N - 2 * n_T - 1
        good = dev <= 1e-9 and count >= need and mask[n_T].sum() == count
        ok &= good
        parts.append(f"N={N}: deviation {dev:.2e}, window {count} >= {need}")
    record(5, "short-window figure matches the closed-form dots", ok, "; ".join(parts))
    assert ok


def test_6_long_run_boundedness():
    parts, ok, peaks = [], True, {}
    for N in (10, 50):
        data = emit_fig_data("fig3", N, steps=5000)
        e = data["e"]
        finite = bool(np.isfinite(e).all())
        variation = float(np.max(np.abs(e[-1] - e[-101])))
        peaks[N] = float(np.max(np.abs(e)))
        good = finite and variation < 1e-6
        ok &= good
        parts.append(f"N={N}: finite={finite}, last-100-step variation {variation:.2e} "
                     f"{'ok' if good else 'OUT'}, max|e| {peaks[N]:.4g}")
    ok &= peaks[50] > peaks[10]
    record(6, "long run settles, max|e| grows with N (5000 steps)", ok, "; ".join(parts))
    assert ok


def test_7_property_suites():
    parts, ok = [], True
    for name in sorted(CHECKS):
        rep = run_suite(name, seeds=range(100))
        ok &= rep["ok"]
        parts.append(f"{name} {rep['cases'] - len(rep['failed_seeds'])}/{rep['cases']}")
    record(7, "property suites", ok, "; ".join(parts) + "; seeds 0..99 each")
    assert ok
