"""Plugging in a controller of your own.

A controller reads a window of relative errors, the messages from its
neighbours and its own memory. At the chain ends the missing slots are NaN,
and the law decides what to do with them. Whatever it does, the central
vehicles follow the same closed form under the ramp.
"""
# %%
import numpy as np

from chainstab.analysis import OracleParams, lemma_window_steps
from chainstab.controllers import ControllerDefinition
from chainstab.core import SimulationConfig
from chainstab.disturbances import RAMP_WINDOWED, DisturbanceProfile
from chainstab.harness.runs import oracle_deviation
from chainstab.harness.simulate import simulate
from chainstab.properties import run_suite

dt = 0.1


# %% A cubic spring on the two nearest gaps, with an integrating memory
def force(e, edot, cp, cm, xi, N, t):
    e = np.nan_to_num(e)
    edot = np.nan_to_num(edot)
    return (e[1] - e[2]) ** 3 + 0.8 * (edot[1] - edot[2]) + 0.1 * xi[0]


def u1(*args):
    return force(*args) * dt


def u2(*args):
    return force(*args) * dt**2 / 2


def memory(xi, e, edot, cp, cm, N, t):
    return (xi[0] + np.nan_to_num(e[1]) * dt,)


ctrl = ControllerDefinition(1, 1, 1, 0, u1, u2, lambda *a: (), lambda *a: (), memory, name="cubic")

# %%
N = 60
n_T = lemma_window_steps(N, 1, 1)
traj = simulate(ctrl, DisturbanceProfile(RAMP_WINDOWED, 1.0, n_T * dt), SimulationConfig(N, dt, n_T))
dev, points = oracle_deviation(traj, OracleParams(1.0, N, dt), n_T)
print(f"cubic law: max relative deviation {dev:.2e} over {points} covered (k, t) pairs")

# %% The structural property suites, as in the acceptance run
for name in ("galilean", "homogeneity", "propagation_cone", "determinism"):
    rep = run_suite(name, seeds=range(20))
    print(f"{name}: {rep['cases'] - len(rep['failed_seeds'])}/{rep['cases']}")
