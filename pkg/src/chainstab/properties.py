"""Seeded randomized checks of structural invariants.

Each ``check_*`` function draws one random case from ``seed`` and returns
a dict with at least ``seed`` and ``ok``. Runs are reproducible from the
seed alone.
"""
from __future__ import annotations

import csv
import io
from dataclasses import replace

import numpy as np

from .controllers import (
    DROP_TERMS, PASSTHROUGH, ControllerDefinition, evaluate_chain, nonlinear_comm_controller,
    pd_asymmetric, pd_symmetric,
)
from .core import ChainState, SimulationConfig
from .disturbances import RAMP_STEP, RAMP_WINDOWED, ZERO, DisturbanceProfile
from .harness.io import TRAJECTORY_HEADER, trajectory_rows
from .harness.simulate import advance, simulate

GALILEAN_RTOL = 1e-9


def random_builtin(rng: np.random.Generator, dt: float) -> ControllerDefinition:
    pick = rng.integers(3)
    if pick == 0:
        return pd_asymmetric(rng.uniform(0.2, 1.5), rng.uniform(0.0, 2.5), rng.uniform(0.0, 2.5), dt)
    if pick == 1:
        return pd_symmetric(rng.uniform(0.2, 1.5), rng.uniform(0.0, 2.5), dt)
    return nonlinear_comm_controller(rng.uniform(0.2, 2.0), rng.uniform(0.1, 2.0), dt)


def random_user_controller(rng: np.random.Generator, boundary: str = PASSTHROUGH) -> ControllerDefinition:
    """Nonlinear law reading every window slot, with random radii and sizes."""
    m1, m2 = (int(v) for v in rng.integers(0, 3, size=2))
    if m1 + m2 == 0:
        m1 = 1
    n_xi, n_c = (int(v) for v in rng.integers(0, 3, size=2))
    width = m1 + m2 + 1
    n_in = 2 * width + 2 * n_c + n_xi
    W = rng.normal(scale=0.3, size=(2 + 2 * n_c + n_xi, n_in))
    bias = rng.normal(scale=0.1, size=W.shape[0])
    bias[:2] = 0.0  # zero input gives zero control

    def _features(e, edot, cp, cm, xi):
        return np.concatenate([e, edot, cp, cm, xi])

    def _out(e, edot, cp, cm, xi, N, t):
        return np.tanh(W @ _features(e, edot, cp, cm, xi) + bias)

    def f1(e, edot, cp, cm, xi, N, t):
        return 0.1 * _out(e, edot, cp, cm, xi, N, t)[0]

    def f2(e, edot, cp, cm, xi, N, t):
        return 0.01 * _out(e, edot, cp, cm, xi, N, t)[1]

    def g1(e, edot, cp, cm, xi, N, t):
        return _out(e, edot, cp, cm, xi, N, t)[2:2 + n_c]

    def g2(e, edot, cp, cm, xi, N, t):
        return _out(e, edot, cp, cm, xi, N, t)[2 + n_c:2 + 2 * n_c]

    def h(xi, e, edot, cp, cm, N, t):
        return _out(e, edot, cp, cm, xi, N, t)[2 + 2 * n_c:]

    return ControllerDefinition(m1, m2, n_xi, n_c, f1, f2, g1, g2, h, boundary=boundary, name="random")


def random_profile(rng: np.random.Generator, dt: float) -> DisturbanceProfile:
    kind = (RAMP_WINDOWED, RAMP_STEP, ZERO)[rng.integers(3)]
    if kind == ZERO:
        return DisturbanceProfile(ZERO)
    return DisturbanceProfile(kind, rng.uniform(0.0, 2.0), int(rng.integers(0, 20)) * dt)


def random_state(rng: np.random.Generator, N: int, n_xi: int, n_c: int, scale: float = 1.0) -> ChainState:
    size = N + 1
    return ChainState(
        n=0,
        x=np.cumsum(-rng.uniform(0.5, 1.5, size=size)) * scale,
        v=rng.normal(scale=scale, size=size),
        xi=rng.normal(scale=0.1, size=(size, n_xi)),
        c_plus=rng.normal(scale=0.1, size=(size, n_c)),
        c_minus=rng.normal(scale=0.1, size=(size, n_c)),
    )


def _random_controller(rng, dt, boundary=DROP_TERMS):
    if rng.random() < 0.75:
        return random_builtin(rng, dt)
    return random_user_controller(rng, boundary)


def check_galilean(seed: int) -> dict:
    """Uniform position and velocity offsets leave the spacing errors unchanged.

    Offsets change floating-point rounding of the positions, so errors are
    compared to ``GALILEAN_RTOL`` of the position scale.
    """
    rng = np.random.default_rng(seed)
    N, dt, H = int(rng.integers(3, 25)), float(rng.uniform(0.05, 0.2)), int(rng.integers(5, 40))
    ctrl = _random_controller(rng, dt)
    profile = random_profile(rng, dt)
    base = random_state(rng, N, ctrl.n_xi, ctrl.n_c)
    a, b = rng.uniform(-100, 100), rng.uniform(-10, 10)
    shifted = replace(base, x=base.x + a, v=base.v + b)
    cfg = SimulationConfig(N, dt, H)
    t1 = simulate(ctrl, profile, cfg, base)
    t2 = simulate(ctrl, profile, cfg, shifted)
    scale = max(1.0, float(np.abs(t2.x).max()), float(np.abs(t1.x).max()))
    diff = float(max(np.abs(t1.e - t2.e).max(), np.abs(t1.edot - t2.edot).max()))
    return {"seed": seed, "controller": ctrl.name, "max_diff": diff,
            "tolerance": GALILEAN_RTOL * scale, "ok": diff <= GALILEAN_RTOL * scale}


def cone_radius(m: int, m1: int, m2: int) -> int:
    """Farthest vehicle an impulse can reach in ``m`` further steps."""
    return m * max(m1, m2) + m1 + m2


def check_propagation_cone(seed: int) -> dict:
    """A local impulse leaves controls outside the cone bit-identical."""
    rng = np.random.default_rng(seed)
    N, dt, H = int(rng.integers(20, 45)), float(rng.uniform(0.05, 0.2)), int(rng.integers(1, 7))
    ctrl = random_builtin(rng, dt)
    profile = random_profile(rng, dt)
    base = random_state(rng, N, ctrl.n_xi, ctrl.n_c)
    j = int(rng.integers(0, N + 1))
    field = ("x", "v", "xi", "c_plus", "c_minus")[rng.integers(5)]
    arr = np.array(getattr(base, field))
    if arr.ndim == 2 and arr.shape[1] == 0:
        field, arr = "x", np.array(base.x)
    arr[j] = arr[j] + rng.normal()
    kicked = replace(base, **{field: arr})
    cfg = SimulationConfig(N, dt, H)
    k = np.arange(N + 1)
    s1, s2, violations, outside = base, kicked, 0, 0
    for m in range(H):
        o1, o2 = evaluate_chain(ctrl, s1, cfg), evaluate_chain(ctrl, s2, cfg)
        far = np.abs(k - j) > cone_radius(m, ctrl.m1, ctrl.m2)
        outside += int(far.sum())
        same = (o1.u1 == o2.u1) & (o1.u2 == o2.u2)
        violations += int((far & ~same).sum())
        s1, _, _ = advance(s1, ctrl, profile, cfg)
        s2, _, _ = advance(s2, ctrl, profile, cfg)
    return {"seed": seed, "controller": ctrl.name, "field": field, "vehicle": j,
            "checked": outside, "violations": violations, "ok": violations == 0}


def _dyadic(rng, size, span=4096):
    return rng.integers(-span, span, size=size) / 1024.0


def check_homogeneity(seed: int) -> dict:
    """Vehicles with element-wise equal inputs produce bit-identical outputs.

    Positions and velocities are dyadic so that the spacing errors of the
    two copied neighbourhoods are exactly equal.
    """
    rng = np.random.default_rng(seed)
    dt = float(rng.uniform(0.05, 0.3))
    ctrl = random_builtin(rng, dt) if rng.random() < 0.5 else random_user_controller(rng)
    m1, m2 = ctrl.m1, ctrl.m2
    span = m1 + m2 + 2
    N = int(rng.integers(2 * span + m1 + m2 + 2, 4 * span + 20))
    j = int(rng.integers(m1 + 1, N - m2 - span))
    k = int(rng.integers(j + span, N - max(m2, 1) + 1))
    state = random_state(rng, N, ctrl.n_xi, ctrl.n_c)
    x, v = _dyadic(rng, N + 1), _dyadic(rng, N + 1)
    xi, cp, cm = (np.array(a) for a in (state.xi, state.c_plus, state.c_minus))
    shift_x, shift_v = _dyadic(rng, None), _dyadic(rng, None)
    for s in range(-m1 - 1, m2 + 1):
        x[k + s] = x[j + s] + shift_x
        v[k + s] = v[j + s] + shift_v
    xi[k], cp[k], cm[k] = xi[j], cp[j], cm[j]
    state = ChainState(int(rng.integers(0, 50)), x, v, xi, cp, cm)
    out = evaluate_chain(ctrl, state, SimulationConfig(N, dt))
    same = [out.u1[j] == out.u1[k], out.u2[j] == out.u2[k], np.array_equal(out.xi[j], out.xi[k])]
    if m1 > 0:
        same.append(np.array_equal(out.c_plus[j + 1], out.c_plus[k + 1]))
    if m2 > 0:
        same.append(np.array_equal(out.c_minus[j - 1], out.c_minus[k - 1]))
    return {"seed": seed, "controller": ctrl.name, "pair": (j, k), "ok": bool(all(same))}


def _csv_text(traj) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    writer.writerows(trajectory_rows(traj, np.zeros(traj.x.shape, dtype=bool)))
    return buf.getvalue()


def random_config_dict(rng: np.random.Generator) -> dict:
    dt = float(rng.choice([0.05, 0.1, 0.2]))
    name = ("zero", "pd_asymmetric", "pd_symmetric", "nonlinear_comm")[rng.integers(4)]
    params = {
        "zero": {},
        "pd_asymmetric": {"a": float(rng.uniform(0.2, 1.5)), "b1": float(rng.uniform(0, 2)), "b2": float(rng.uniform(0, 2))},
        "pd_symmetric": {"a": float(rng.uniform(0.2, 1.5)), "b": float(rng.uniform(0, 2))},
        "nonlinear_comm": {"kappa": float(rng.uniform(0.2, 2)), "sat_limit": float(rng.uniform(0.1, 2))},
    }[name]
    kind = ("ramp-windowed", "ramp-step")[rng.integers(2)]
    if rng.random() < 0.5:
        amplitude = {"alpha": float(rng.uniform(0, 2))}
    else:
        amplitude = {"budget": {"definition_id": int(rng.integers(1, 5)), "p": int(rng.integers(1, 4)),
                                "q": int(rng.integers(1, 4)), "C1": float(rng.uniform(0.5, 2))}}
    return {
        "schema_version": "1",
        "sim": {"N": int(rng.integers(4, 30)), "dt": dt, "horizon": {"steps": int(rng.integers(10, 40))}},
        "controller": {"name": name, "params": params},
        "disturbance": {"kind": kind, "T": "lemma-window", **amplitude},
    }


def check_determinism(seed: int) -> dict:
    """Repeated runs, and runs from a re-parsed config, are byte-identical."""
    from .harness.config import parse_config
    from .harness.runs import run_simulation

    rng = np.random.default_rng(seed)
    cfg = parse_config(random_config_dict(rng))
    again = parse_config(cfg.to_json())
    r1, r2, r3 = run_simulation(cfg), run_simulation(cfg), run_simulation(again)
    texts = [_csv_text(r.trajectory) for r in (r1, r2, r3)]
    states_equal = r1.trajectory.final == r2.trajectory.final == r3.trajectory.final
    return {"seed": seed, "controller": cfg.controller.name,
            "ok": bool(states_equal and texts[0] == texts[1] == texts[2] and again == cfg)}


CHECKS = {
    "galilean": check_galilean,
    "propagation_cone": check_propagation_cone,
    "homogeneity": check_homogeneity,
    "determinism": check_determinism,
}


def run_suite(name: str, seeds=range(100)) -> dict:
    results = [CHECKS[name](int(s)) for s in seeds]
    failed = [r["seed"] for r in results if not r["ok"]]
    return {"property": name, "seeds": [int(s) for s in seeds], "cases": len(results),
            "failed_seeds": failed, "ok": not failed}


if __name__ == "__main__":
    import json
    import sys

    names = sys.argv[1:] or list(CHECKS)
    reports = [run_suite(n) for n in names]
    for rep in reports:
        print(json.dumps({k: rep[k] for k in ("property", "cases", "failed_seeds", "ok")}))
    sys.exit(0 if all(r["ok"] for r in reports) else 1)
