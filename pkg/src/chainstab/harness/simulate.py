from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..controllers import ControllerDefinition, evaluate_chain
from ..core import ChainState, SimulationConfig, StepInput, init_zero, step
from ..disturbances import DisturbanceProfile, sample_chain


@dataclass
class Trajectory:
    """Recorded run: row ``i`` of every array is step ``n0 + i``.

    ``d1``/``d2`` hold the disturbance sampled at that step (the last row
    is never applied).
    """

    dt: float
    n0: int
    x: np.ndarray
    v: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    final: ChainState

    @property
    def N(self) -> int:
        return self.x.shape[1] - 1

    @property
    def steps(self) -> np.ndarray:
        return self.n0 + np.arange(self.x.shape[0])

    @property
    def t(self) -> np.ndarray:
        return self.steps * self.dt

    @property
    def e(self) -> np.ndarray:
        """Spacing errors, shape ``(steps, N)``; column ``j`` is e_{j+1}."""
        return self.x[:, :-1] - self.x[:, 1:]

    @property
    def edot(self) -> np.ndarray:
        return self.v[:, :-1] - self.v[:, 1:]


def advance(state: ChainState, controller: ControllerDefinition, profile: DisturbanceProfile,
            config: SimulationConfig) -> tuple[ChainState, np.ndarray, np.ndarray]:
    """One closed-loop step. Returns the next state and the applied disturbance."""
    out = evaluate_chain(controller, state, config)
    d1, d2 = sample_chain(profile, state.n, config.N, config.dt)
    nxt = step(state, StepInput(out.u1, out.u2, d1, d2), config.dt)
    return replace(nxt, xi=out.xi, c_plus=out.c_plus, c_minus=out.c_minus), d1, d2


def simulate(controller: ControllerDefinition, profile: DisturbanceProfile, config: SimulationConfig,
             initial: ChainState | None = None) -> Trajectory:
    """Run ``config.horizon`` closed-loop steps, from rest unless ``initial`` is given."""
    state = initial if initial is not None else init_zero(config, controller.n_xi, controller.n_c)
    H, size = config.horizon, config.N + 1
    x = np.empty((H + 1, size))
    v = np.empty((H + 1, size))
    d1 = np.empty((H + 1, size))
    d2 = np.empty((H + 1, size))
    n0 = state.n
    for i in range(H):
        x[i], v[i] = state.x, state.v
        state, d1[i], d2[i] = advance(state, controller, profile, config)
    x[H], v[H] = state.x, state.v
    d1[H], d2[H] = sample_chain(profile, state.n, config.N, config.dt)
    return Trajectory(config.dt, n0, x, v, d1, d2, state)
