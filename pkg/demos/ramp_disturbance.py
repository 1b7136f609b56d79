"""Ramp disturbance and its budget.

Every follower gets a push proportional to its index. The leader is left
alone and the last vehicle gets the full amplitude. Run with
``python demos/ramp_disturbance.py``; the figure goes to ``demos/output``.
"""
# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chainstab.disturbances import AmplitudeBudget, admissible_alpha
from chainstab.harness.runs import emit_fig_data

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# %% Per-vehicle once-integrated disturbance for a 10-vehicle chain
data = emit_fig_data("fig1", 10, steps=50)
fig, ax = plt.subplots(figsize=(6, 4))
for k in range(data["d1"].shape[1]):
    ax.step(data["t"], data["d1"][:, k], where="post", label=f"k={k}" if k in (0, 10) else None)
ax.set_xlabel("t")
ax.set_ylabel("d_k,1")
ax.legend()
fig.savefig(OUT / "ramp_disturbance.png", dpi=120)

# %% How large may the ramp be? It depends on the criterion.
T, dt = 1.0, 0.1
for N in (10, 40, 160, 640):
    row = [admissible_alpha(AmplitudeBudget(d, 2, 2), N, T, dt) for d in (1, 2, 3, 4)]
    print(f"N={N:4d} " + " ".join(f"def{d}={a:.4f}" for d, a in zip((1, 2, 3, 4), row)))

# %% Sum-type criteria shrink the amplitude like N^(-1/2); the sup criterion keeps it at 1.
Ns = np.array([40, 80, 160, 320, 640])
alphas = [admissible_alpha(AmplitudeBudget(1, 2, 2), int(N), T, dt) for N in Ns]
print("slope in N:", np.polyfit(np.log(Ns), np.log(alphas), 1)[0])
