"""Growth of the error metrics with chain length.

Each criterion fixes the disturbance budget, which fixes how large the ramp
may be at each N. The resulting error metric still grows with N, at a rate
that depends on the criterion. The fits below use the closed form and the
runs are checked against full simulations up to N=160.
"""
# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chainstab.harness.config import parse_config
from chainstab.harness.runs import run_sweep

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def sweep(budget, sizes, oracle_only=True):
    cfg = parse_config({
        "schema_version": "1",
        "sim": {"N_list": sizes, "dt": 0.1, "horizon": "lemma-window"},
        "controller": {"name": "pd_asymmetric", "params": {"a": 1, "b1": 2, "b2": 0.5}},
        "disturbance": {"kind": "ramp-windowed", "budget": budget, "T": "lemma-window"},
        "criterion": budget,
    })
    return run_sweep(cfg, oracle_only=oracle_only)


# %%
criteria = {
    "def1 p=q=2": {"definition_id": 1, "p": 2, "q": 2},
    "def2 p=q=2": {"definition_id": 2, "p": 2, "q": 2},
    "def3 p=2": {"definition_id": 3, "p": 2},
    "def4": {"definition_id": 4},
    "def1 p=2 q=1": {"definition_id": 1, "p": 2, "q": 1},
}
fig, ax = plt.subplots(figsize=(6, 4))
for label, budget in criteria.items():
    for sizes in ([40, 80, 160, 320], [320, 640, 1280, 2560]):
        rep = sweep(budget, sizes)["scaling_report"]
        print(f"{label:13s} N={sizes[0]}..{sizes[-1]}: fitted {rep['fitted_exponent']:.3f}"
              f" reference {rep['reference_exponent']:g}")
    N, m = np.array(sweep(budget, [40, 80, 160, 320, 640, 1280])["scaling_report"]["samples"]).T
    ax.loglog(N, m, "o-", label=label)
ax.set_xlabel("N")
ax.set_ylabel("error metric")
ax.legend()
fig.savefig(OUT / "growth_exponents.png", dpi=120)

# %% Simulation cross-check
rep = sweep(criteria["def4"], [40, 80, 160], oracle_only=False)
print("simulation vs closed form:", rep["simulation_vs_oracle_max_relative"])
