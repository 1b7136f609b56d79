"""Homogeneous relative-measurement controllers for the vehicle chain.

A controller is five pure maps evaluated identically at every vehicle.
Vehicle ``k`` sees the spacing-error window ``e[k-m1 .. k+m2]`` (and the
matching relative velocities), the signals delivered to it on the forward
and backward channels, its own memory, the chain size and the time::

    u1 = f1(e, edot, c_plus, c_minus, xi, N, t)
    u2 = f2(e, edot, c_plus, c_minus, xi, N, t)
    signal to k+1 = g1(e, edot, c_plus, c_minus, xi, N, t)
    signal to k-1 = g2(e, edot, c_plus, c_minus, xi, N, t)
    next memory = h(xi, e, edot, c_plus, c_minus, N, t)

Window slots that fall outside the chain (``e_j`` with j < 1 or j > N) are
NaN and flagged in :attr:`NeighborhoodWindow.absent`.

Signals produced at step ``n`` are delivered at step ``n+1``. There is no
forward channel when ``m1 == 0`` and no backward channel when ``m2 == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .core import ChainState, DimensionError, SimulationConfig

ControlMap = Callable[..., object]

#: built-in laws are sums of per-slot terms; absent slots drop their term
DROP_TERMS = "drop-terms"
#: user laws receive NaN-marked slots and handle boundaries themselves
PASSTHROUGH = "passthrough"


@dataclass(frozen=True)
class ControllerDefinition:
    m1: int
    m2: int
    n_xi: int
    n_c: int
    f1: ControlMap
    f2: ControlMap
    g1: ControlMap
    g2: ControlMap
    h: ControlMap
    boundary: str = PASSTHROUGH
    name: str = "custom"

    def __post_init__(self):
        if min(self.m1, self.m2, self.n_xi, self.n_c) < 0:
            raise ValueError("radii and dimensions must be >= 0")
        if self.boundary not in (DROP_TERMS, PASSTHROUGH):
            raise ValueError(f"unknown boundary mode {self.boundary!r}")

    @property
    def width(self) -> int:
        return self.m1 + self.m2 + 1


class NeighborhoodWindow(NamedTuple):
    e: np.ndarray
    edot: np.ndarray
    absent: np.ndarray

    @property
    def complete(self) -> bool:
        return not self.absent.any()


class ControlOutputs(NamedTuple):
    u1: np.ndarray
    u2: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    xi: np.ndarray


def _padded(values: np.ndarray, m1: int, m2: int) -> np.ndarray:
    # index k of the result starts the window of vehicle k
    return np.concatenate([np.full(m1 + 1, np.nan), values, np.full(m2 + 1, np.nan)])


def window_at(e: np.ndarray, edot: np.ndarray, k: int, m1: int, m2: int) -> NeighborhoodWindow:
    """Window ``e[k-m1 .. k+m2]`` for vehicle ``k``; ``e`` holds e_1..e_N."""
    pe, pd = _padded(e, m1, m2), _padded(edot, m1, m2)
    w = slice(k, k + m1 + m2 + 1)
    return NeighborhoodWindow(pe[w], pd[w], np.isnan(pe[w]))


def boundary_adapt(controller: ControllerDefinition, window: NeighborhoodWindow) -> NeighborhoodWindow:
    """Effective window seen by the control maps.

    For built-in laws, which are sums of one term per slot, a missing
    neighbour's term is dropped by giving it a zero contribution. User laws
    get the window unchanged, NaN markers and mask included.
    """
    if controller.boundary == PASSTHROUGH or window.complete:
        return window
    return NeighborhoodWindow(
        np.where(window.absent, 0.0, window.e),
        np.where(window.absent, 0.0, window.edot),
        window.absent,
    )


def _vector(value, dim: int, what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float).reshape(-1)
    if arr.shape != (dim,):
        raise DimensionError(f"{what} returned shape {arr.shape}, expected ({dim},)")
    return arr


def evaluate_chain(controller: ControllerDefinition, state: ChainState, config: SimulationConfig) -> ControlOutputs:
    """Evaluate every vehicle's control law on the frozen pre-step state.

    Returns ``(u1, u2, next_c_plus, next_c_minus, next_xi)``.
    """
    N = state.N
    if N != config.N:
        raise DimensionError(f"state has N={N}, config has N={config.N}")
    if state.n_xi != controller.n_xi or state.n_c != controller.n_c:
        raise DimensionError(
            f"state carries n_xi={state.n_xi}, n_c={state.n_c}; "
            f"controller expects n_xi={controller.n_xi}, n_c={controller.n_c}"
        )
    m1, m2, width = controller.m1, controller.m2, controller.width
    t = state.n * config.dt

    e = state.x[:-1] - state.x[1:]
    edot = state.v[:-1] - state.v[1:]
    pe, pd = _padded(e, m1, m2), _padded(edot, m1, m2)
    absent = np.isnan(pe)
    # absent slots only occur for k <= m1 or k > N - m2
    edge = {k for k in range(N + 1) if absent[k:k + width].any()}

    u1 = np.empty(N + 1)
    u2 = np.empty(N + 1)
    sent_fwd = np.zeros((N + 1, controller.n_c))
    sent_bwd = np.zeros((N + 1, controller.n_c))
    next_xi = np.empty((N + 1, controller.n_xi))
    for k in range(N + 1):
        we, wd = pe[k:k + width], pd[k:k + width]
        if k in edge:
            we, wd, _ = boundary_adapt(controller, NeighborhoodWindow(we, wd, absent[k:k + width]))
        cp, cm, xi = state.c_plus[k], state.c_minus[k], state.xi[k]
        u1[k] = controller.f1(we, wd, cp, cm, xi, N, t)
        u2[k] = controller.f2(we, wd, cp, cm, xi, N, t)
        if controller.n_c:
            sent_fwd[k] = _vector(controller.g1(we, wd, cp, cm, xi, N, t), controller.n_c, "g1")
            sent_bwd[k] = _vector(controller.g2(we, wd, cp, cm, xi, N, t), controller.n_c, "g2")
        if controller.n_xi:
            next_xi[k] = _vector(controller.h(xi, we, wd, cp, cm, N, t), controller.n_xi, "h")

    next_c_plus = np.zeros_like(sent_fwd)
    next_c_minus = np.zeros_like(sent_bwd)
    if m1 > 0:
        next_c_plus[1:] = sent_fwd[:-1]
    if m2 > 0:
        next_c_minus[:-1] = sent_bwd[1:]
    return ControlOutputs(u1, u2, next_c_plus, next_c_minus, next_xi)


# built-in controllers ------------------------------------------------------


def _zero_scalar(*args):
    return 0.0


def zero_controller(m1: int = 1, m2: int = 1) -> ControllerDefinition:
    return ControllerDefinition(
        m1=m1, m2=m2, n_xi=0, n_c=0,
        f1=_zero_scalar, f2=_zero_scalar, g1=_zero_scalar, g2=_zero_scalar, h=_zero_scalar,
        boundary=DROP_TERMS, name="zero",
    )


def pd_asymmetric(a: float, b1: float, b2: float, dt: float) -> ControllerDefinition:
    """Bidirectional PD law with sample-and-hold actuation.

    ``f = b1*(v_{k-1}-v_k) + b2*(v_{k+1}-v_k) + a*(x_{k-1}-x_k) + a*(x_{k+1}-x_k)``,
    applied as ``u1 = f*dt`` and ``u2 = f*dt**2/2``. In window terms
    (slot 1 is e_k, slot 2 is e_{k+1}) this is
    ``b1*edot_k - b2*edot_{k+1} + a*e_k - a*e_{k+1}``.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")

    def force(e, edot):
        return b1 * edot[1] - b2 * edot[2] + a * e[1] - a * e[2]

    def f1(e, edot, cp, cm, xi, N, t):
        return force(e, edot) * dt

    def f2(e, edot, cp, cm, xi, N, t):
        return force(e, edot) * (dt * dt / 2)

    return ControllerDefinition(
        m1=1, m2=1, n_xi=0, n_c=0,
        f1=f1, f2=f2, g1=_zero_scalar, g2=_zero_scalar, h=_zero_scalar,
        boundary=DROP_TERMS, name="pd_asymmetric",
    )


def pd_symmetric(a: float, b: float, dt: float) -> ControllerDefinition:
    ctrl = pd_asymmetric(a, b, b, dt)
    return replace(ctrl, name="pd_symmetric")


def nonlinear_comm_controller(kappa: float, sat_limit: float, dt: float) -> ControllerDefinition:
    """Saturated law with one memory state and one signal per channel.

    Forward signal ``e_k``, backward signal ``e_{k+1}``, memory
    ``xi' = (xi + e_k)/2`` and force
    ``clip(kappa*(e_k - e_{k+1} + c_plus - c_minus + xi), -sat, sat)``.
    """
    if not (kappa > 0 and sat_limit > 0 and dt > 0):
        raise ValueError("kappa, sat_limit and dt must be > 0")

    def force(e, cp, cm, xi):
        raw = kappa * (e[1] - e[2] + cp[0] - cm[0] + xi[0])
        return min(max(raw, -sat_limit), sat_limit)

    def f1(e, edot, cp, cm, xi, N, t):
        return force(e, cp, cm, xi) * dt

    def f2(e, edot, cp, cm, xi, N, t):
        return force(e, cp, cm, xi) * (dt * dt / 2)

    def g1(e, edot, cp, cm, xi, N, t):
        return (e[1],)

    def g2(e, edot, cp, cm, xi, N, t):
        return (e[2],)

    def h(xi, e, edot, cp, cm, N, t):
        return (0.5 * xi[0] + 0.5 * e[1],)

    return ControllerDefinition(
        m1=1, m2=1, n_xi=1, n_c=1,
        f1=f1, f2=f2, g1=g1, g2=g2, h=h,
        boundary=DROP_TERMS, name="nonlinear_comm",
    )


BUILTIN = {
    "zero": zero_controller,
    "pd_asymmetric": pd_asymmetric,
    "pd_symmetric": pd_symmetric,
    "nonlinear_comm": nonlinear_comm_controller,
}


def make_controller(name: str, params: dict, dt: float) -> ControllerDefinition:
    """Build a built-in controller from its name and parameter record."""
    try:
        factory = BUILTIN[name]
    except KeyError:
        raise ValueError(f"unknown controller {name!r}; choose from {sorted(BUILTIN)}") from None
    if name == "zero":
        return factory(**params)
    return factory(dt=dt, **params)
