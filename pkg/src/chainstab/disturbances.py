"""Ramp disturbances graded along the chain, and their budget norms.

The ramp pushes vehicle ``k`` with the per-step pair::

    d1 = alpha * k * dt / N        d2 = alpha * k * dt**2 / N

on the inclusive grid ``t = 0, dt, ..., T`` (``ramp-windowed``) or for every
``t >= 0`` (``ramp-step``). Both are zero for ``t < 0``.

Norms follow the four string-stability definitions, with ``s = 1, 2``
indexing the once/twice integrated channel and every sample normalised by
``dt**s``:

=========  ==========================================================
def 1, 2   sum_s sum_k (sum_n |d_ks / dt^s|^p dt)^(q/p)
def 3      max_{k,s} sum_n |d_ks / dt^s|^p dt
def 4      max_{k,s,n} |d_ks| / dt^s
=========  ==========================================================
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import grid_steps

RAMP_WINDOWED = "ramp-windowed"
RAMP_STEP = "ramp-step"
ZERO = "zero"
KINDS = (RAMP_WINDOWED, RAMP_STEP, ZERO)


class ParameterError(ValueError):
    """Raised for a (definition, p, q) combination that is not defined."""


@dataclass(frozen=True)
class DisturbanceProfile:
    kind: str
    alpha: float = 0.0
    T: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}; choose from {KINDS}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")
        if self.kind == RAMP_WINDOWED and (self.T is None or self.T < 0):
            raise ValueError("ramp-windowed needs a window end T >= 0")

    def last_active_step(self, dt: float) -> int | None:
        """Index of the last nonzero step, or None when unbounded."""
        if self.kind == RAMP_WINDOWED:
            return grid_steps(self.T, dt)
        if self.kind == ZERO:
            return -1
        return None

    def scaled(self, factor: float) -> "DisturbanceProfile":
        return DisturbanceProfile(self.kind, self.alpha * factor, self.T)


@dataclass(frozen=True)
class AmplitudeBudget:
    definition_id: int
    p: int = 2
    q: int = 2
    C1: float = 1.0

    def __post_init__(self):
        check_criterion(self.definition_id, self.p, self.q)
        if not self.C1 > 0:
            raise ParameterError(f"C1 must be > 0, got {self.C1!r}")

    @property
    def degree(self) -> int:
        """Homogeneity degree of the disturbance norm in alpha."""
        return {1: self.q, 2: self.q, 3: self.p, 4: 1}[self.definition_id]


def check_criterion(definition_id: int, p=None, q=None) -> None:
    if definition_id not in (1, 2, 3, 4):
        raise ParameterError(f"definition_id must be 1..4, got {definition_id!r}")
    needed = {1: ("p", "q"), 2: ("p", "q"), 3: ("p",), 4: ()}[definition_id]
    for name in needed:
        value = {"p": p, "q": q}[name]
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise ParameterError(
                f"definition {definition_id} needs integer {name} >= 1, got {value!r}"
            )


def _active(profile: DisturbanceProfile, n, dt: float):
    n = np.asarray(n)
    if profile.kind == ZERO:
        return np.zeros(n.shape, dtype=bool)
    on = n >= 0
    if profile.kind == RAMP_WINDOWED:
        on &= n <= profile.last_active_step(dt)
    return on


def sample(profile: DisturbanceProfile, k: int, n: int, N: int, dt: float) -> tuple[float, float]:
    """Disturbance pair ``(d1, d2)`` applied to vehicle ``k`` at step ``n``."""
    if not 0 <= k <= N:
        raise IndexError(f"vehicle index {k} outside 0..{N}")
    if not _active(profile, n, dt):
        return 0.0, 0.0
    return profile.alpha * k * dt / N, profile.alpha * k * dt**2 / N


def sample_chain(profile: DisturbanceProfile, n: int, N: int, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Disturbances for all vehicles at step ``n``; same values as :func:`sample`."""
    k = np.arange(N + 1)
    if not _active(profile, n, dt):
        zero = np.zeros(N + 1)
        return zero, zero.copy()
    return profile.alpha * k * dt / N, profile.alpha * k * dt**2 / N


def disturbance_history(profile: DisturbanceProfile, N: int, dt: float, horizon: int):
    """Arrays ``d1, d2`` of shape ``(horizon, N+1)`` for steps ``0..horizon-1``."""
    n = np.arange(horizon)[:, None]
    k = np.arange(N + 1)[None, :]
    on = _active(profile, n, dt)
    d1 = np.where(on, profile.alpha * k * dt / N, 0.0)
    d2 = np.where(on, profile.alpha * k * dt**2 / N, 0.0)
    return d1, d2


def disturbance_norm(profile: DisturbanceProfile, budget: AmplitudeBudget, N: int, dt: float, horizon: int) -> float:
    """Budget-side norm of ``profile`` summed over steps ``0..horizon-1``.

    For ``ramp-step`` the sums in definitions 1 to 3 grow with the
    truncation horizon; only definition 4 has a horizon-free value.
    """
    last = profile.last_active_step(dt)
    if last is not None and horizon < last + 1:
        raise ValueError(
            f"horizon {horizon} does not cover the disturbance support (steps 0..{last})"
        )
    d1, d2 = disturbance_history(profile, N, dt, horizon)
    channels = (np.abs(d1) / dt, np.abs(d2) / dt**2)
    p, q = budget.p, budget.q
    if budget.definition_id == 4:
        return float(max(c.max() for c in channels))
    per_vehicle = [np.sum(c**p, axis=0) * dt for c in channels]
    if budget.definition_id == 3:
        return float(max(s.max() for s in per_vehicle))
    return float(sum(np.sum(s ** (q / p)) for s in per_vehicle))


def admissible_alpha(budget: AmplitudeBudget, N: int, T: float, dt: float) -> float:
    """Largest ramp amplitude whose windowed norm equals ``budget.C1``.

    The norm is homogeneous in alpha, so one unit-amplitude evaluation
    inverts it exactly.
    """
    if N < 1 or not T > 0 or not dt > 0:
        raise ValueError("need N >= 1, T > 0 and dt > 0")
    unit = DisturbanceProfile(RAMP_WINDOWED, 1.0, T)
    norm = disturbance_norm(unit, budget, N, dt, grid_steps(T, dt) + 1)
    return (budget.C1 / norm) ** (1.0 / budget.degree)
