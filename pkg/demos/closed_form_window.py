"""Controller-independent response to the ramp.

Until boundary information reaches it, each central vehicle feels only the
ramp, so its spacing error is the same for every homogeneous controller.
This script overlays the simulated errors of four very different laws on
the closed form.
"""
# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chainstab.analysis import OracleParams, lemma_window_steps, oracle_series, validity_window
from chainstab.controllers import make_controller
from chainstab.core import SimulationConfig
from chainstab.disturbances import RAMP_WINDOWED, DisturbanceProfile
from chainstab.harness.runs import emit_fig_data
from chainstab.harness.simulate import simulate

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)
N, dt = 50, 0.1

# %% Four controllers, one ramp
laws = {
    "zero": {},
    "pd_asymmetric": {"a": 1, "b1": 2, "b2": 0.5},
    "pd_symmetric": {"a": 1, "b": 1},
    "nonlinear_comm": {"kappa": 1, "sat_limit": 0.5},
}
n_T = lemma_window_steps(N, 1, 1)
profile = DisturbanceProfile(RAMP_WINDOWED, 1.0, n_T * dt)
ref_e, _ = oracle_series(OracleParams(1.0, N, dt), n_T)
k_mid = N // 2
fig, ax = plt.subplots(figsize=(6, 4))
for name, params in laws.items():
    traj = simulate(make_controller(name, params, dt), profile, SimulationConfig(N, dt, n_T))
    ax.plot(traj.t, traj.e[:, k_mid - 1], label=name, alpha=0.7)
    print(f"{name:15s} e_{k_mid}(T) = {traj.e[-1, k_mid - 1]:.12f}")
ax.plot(np.arange(n_T + 1) * dt, ref_e, "k.", label="closed form")
ax.set_xlabel("t")
ax.set_ylabel(f"e_{k_mid}")
ax.legend()
fig.savefig(OUT / "controller_independence.png", dpi=120)

# %% Who is covered? The window shrinks by one vehicle per side per step.
for n in (0, 5, n_T):
    w = validity_window(OracleParams(1.0, N, dt), n * dt)
    print(f"t={n * dt:.1f}: vehicles {w.start}..{w.stop - 1} ({len(w)})")

# %% Short-window plot with the step ramp and PD(1, 2, 0.5)
data = emit_fig_data("fig2", N)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(data["t"], data["e"], color="0.6", lw=0.8)
ax.plot(data["oracle_t"], data["oracle_e"], "k.")
ax.set_xlabel("t")
ax.set_ylabel("e_k")
fig.savefig(OUT / "short_window.png", dpi=120)
