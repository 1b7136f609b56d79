"""Exact discrete-time model of a chain of N+1 double integrators.

Vehicle 0 is the leader. Over one step of length ``dt`` each vehicle
receives a once-integrated input ``u1 + d1`` and a twice-integrated input
``u2 + d2``::

    v_k' = v_k + u1_k + d1_k
    x_k' = x_k + v_k * dt + u2_k + d2_k

The position update uses the pre-step velocity.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class ConfigurationError(ValueError):
    """Raised for invalid chain or run parameters."""


class DimensionError(ValueError):
    """Raised when array shapes disagree with the chain size."""


class GridError(ValueError):
    """Raised when a time is not a non-negative multiple of the step."""


def grid_steps(t: float, dt: float, rtol: float = 1e-9) -> int:
    """Number of steps ``n`` with ``n * dt == t``."""
    n = round(t / dt)
    if n < 0 or abs(t / dt - n) > rtol * max(1.0, abs(n)):
        raise GridError(f"t={t!r} is not a non-negative multiple of dt={dt!r}")
    return int(n)


def _frozen(a, shape=None) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SimulationConfig:
    N: int
    dt: float
    horizon: int = 1

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"N must be an integer >= 1, got {self.N!r}")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be > 0, got {self.dt!r}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigurationError(f"horizon must be an integer >= 1, got {self.horizon!r}")


@dataclass(frozen=True, eq=False)
class ChainState:
    """Immutable snapshot of the chain at step ``n``.

    ``xi`` has shape ``(N+1, n_xi)``; ``c_plus``/``c_minus`` have shape
    ``(N+1, n_c)`` and hold the signals delivered to each vehicle at this
    step.
    """

    n: int
    x: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray

    def __post_init__(self):
        x = _frozen(self.x)
        size = x.shape[0]
        if x.ndim != 1 or size < 2:
            raise DimensionError("x must be a 1-d sequence of length N+1 >= 2")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", _frozen(self.v))
        if self.v.shape != (size,):
            raise DimensionError(f"v has shape {self.v.shape}, expected ({size},)")
        for name in ("xi", "c_plus", "c_minus"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim == 1 and arr.shape[0] == size:
                arr = arr.reshape(size, 1)
            if arr.ndim != 2 or arr.shape[0] != size:
                raise DimensionError(f"{name} must have shape (N+1, dim), got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.n < 0:
            raise ConfigurationError("step counter must be >= 0")

    @property
    def N(self) -> int:
        return self.x.shape[0] - 1

    @property
    def n_xi(self) -> int:
        return self.xi.shape[1]

    @property
    def n_c(self) -> int:
        return self.c_plus.shape[1]

    def time(self, dt: float) -> float:
        return self.n * dt

    def __eq__(self, other):
        if not isinstance(other, ChainState):
            return NotImplemented
        return self.n == other.n and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("x", "v", "xi", "c_plus", "c_minus")
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class StepInput:
    u1: np.ndarray
    u2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    def __post_init__(self):
        for name in ("u1", "u2", "d1", "d2"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        shapes = {getattr(self, f).shape for f in ("u1", "u2", "d1", "d2")}
        if len(shapes) != 1:
            raise DimensionError(f"step input sequences differ in shape: {sorted(shapes)}")


def init_zero(config: SimulationConfig, n_xi: int = 0, n_c: int = 0) -> ChainState:
    """Chain at rest: zero positions, velocities, memories and signals."""
    if not isinstance(config, SimulationConfig):
        raise ConfigurationError("init_zero expects a SimulationConfig")
    if n_xi < 0 or n_c < 0:
        raise ConfigurationError("memory and signal dimensions must be >= 0")
    size = config.N + 1
    return ChainState(
        n=0,
        x=np.zeros(size),
        v=np.zeros(size),
        xi=np.zeros((size, n_xi)),
        c_plus=np.zeros((size, n_c)),
        c_minus=np.zeros((size, n_c)),
    )


def step(state: ChainState, inp: StepInput, dt: float) -> ChainState:
    """Advance positions and velocities by one exact step.

    Memory and communication fields are carried over unchanged; the
    controller layer replaces them.
    """
    size = state.x.shape[0]
    if inp.u1.shape != (size,):
        raise DimensionError(f"step input has shape {inp.u1.shape}, chain has {size} vehicles")
    v_next = state.v + inp.u1 + inp.d1
    x_next = state.x + state.v * dt + inp.u2 + inp.d2
    return replace(state, n=state.n + 1, x=x_next, v=v_next)


def spacing_errors(state: ChainState) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(e, edot)`` with ``e[k-1] = x_{k-1} - x_k`` for k = 1..N."""
    return -np.diff(state.x), -np.diff(state.v)
