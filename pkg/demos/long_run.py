"""Long run of the PD chain under the step ramp.

For a fixed chain the errors settle to finite limits, but the limit grows
with N. Longer chains also settle much more slowly: the slowest error mode
of the 50-vehicle chain decays by about 2e-4 per step, so 5000 steps are
not yet enough to flatten it.
"""
# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chainstab.harness.runs import emit_fig_data

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# %%
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, N in zip(axes, (10, 50)):
    data = emit_fig_data("fig3", N, steps=5000)
    ax.plot(data["t"], data["e"], lw=0.7)
    ax.axvline(data["marker"]["T"], color="k", ls="--")
    ax.set_title(f"N={N}")
    ax.set_xlabel("t")
    e = data["e"]
    print(f"N={N}: max|e|={np.abs(e).max():.3f}, last-100-step change={np.abs(e[-1] - e[-101]).max():.2e}")
axes[0].set_ylabel("e_k")
fig.savefig(OUT / "long_run.png", dpi=120)
