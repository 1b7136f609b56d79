"""Closed-form ramp response, error metrics and growth exponents.

Under the ramp disturbance from rest, every vehicle far enough from both
chain ends has not yet received any boundary information, so its spacing
error follows a controller-independent closed form::

    |e_k(t)| = t (t + dt) alpha / (2 N),   |edot_k(t)| = t alpha / N

for ``k`` strictly between ``(t/dt) m1`` and ``N - (t/dt) m2``. With the
ramp increasing in ``k`` and ``e_k = x_{k-1} - x_k``, followers are pushed
harder than their predecessors and the errors are negative; the signed
values are ``RAMP_ERROR_SIGN`` times the magnitudes.
"""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import grid_steps
from .disturbances import ParameterError, check_criterion

RAMP_ERROR_SIGN = -1.0


class FitError(ValueError):
    """Raised when a log-log fit is not defined for the given samples."""


@dataclass(frozen=True)
class OracleParams:
    alpha: float
    N: int
    dt: float
    m1: int = 1
    m2: int = 1


def lemma1_oracle(params: OracleParams, t: float) -> tuple[float, float]:
    """Magnitudes ``(e, edot)`` of the closed-form ramp response at time ``t``."""
    n = grid_steps(t, params.dt)
    t = n * params.dt
    return t * (t + params.dt) * params.alpha / (2 * params.N), t * params.alpha / params.N


def oracle_spacing(params: OracleParams, t: float) -> tuple[float, float]:
    """Signed closed-form ``(e_k, edot_k)`` under the chain's sign convention."""
    e, edot = lemma1_oracle(params, t)
    return RAMP_ERROR_SIGN * e, RAMP_ERROR_SIGN * edot


def oracle_series(params: OracleParams, n_last: int) -> tuple[np.ndarray, np.ndarray]:
    """Signed closed-form values on steps ``0..n_last``."""
    t = np.arange(n_last + 1) * params.dt
    e = RAMP_ERROR_SIGN * t * (t + params.dt) * params.alpha / (2 * params.N)
    edot = RAMP_ERROR_SIGN * t * params.alpha / params.N
    return e, edot


def validity_window(params: OracleParams, t: float, N: int | None = None) -> range:
    """Vehicles ``k`` with ``(t/dt) m1 < k < N - (t/dt) m2``; may be empty."""
    N = params.N if N is None else N
    n = grid_steps(t, params.dt)
    return range(n * params.m1 + 1, N - n * params.m2)


def lemma_window_steps(N: int, m1: int, m2: int) -> int:
    if m1 + m2 < 1:
        raise ValueError("m1 + m2 must be >= 1")
    return N // (2 * (m1 + m2))


def lemma_window_T(N: int, dt: float, m1: int, m2: int) -> float:
    """``N dt / (2 (m1 + m2))`` floored to the step grid.

    At this time the closed form still covers at least ``N/2 - 1`` vehicles.
    """
    return lemma_window_steps(N, m1, m2) * dt


def fig2_steps(N: int) -> int:
    """Steps in the short window ``T = N dt / 5``, floored to the grid."""
    return N // 5


def error_metric(e_history, definition_id: int, p: int = 2, q: int = 2, dt: float = 1.0):
    """Output-side norm of an error history of shape ``(steps, vehicles)``.

    Definitions 1 and 3 return one value ``sum_n |e_j|^p dt`` per vehicle.
    Definition 2 returns ``sum_k (sum_n |e_k|^p dt)^(q/p)`` and definition 4
    returns ``max |e|``.
    """
    check_criterion(definition_id, p, q)
    e = np.abs(np.atleast_2d(np.asarray(e_history, dtype=float)))
    if e.size == 0:
        raise ValueError("error history is empty")
    if definition_id == 4:
        return float(e.max())
    per_vehicle = np.sum(e**p, axis=0) * dt
    if definition_id == 2:
        return float(np.sum(per_vehicle ** (q / p)))
    return per_vehicle


def summary_metric(e_history, definition_id: int, p: int = 2, q: int = 2, dt: float = 1.0) -> float:
    """Scalar metric: worst vehicle for definitions 1 and 3."""
    value = error_metric(e_history, definition_id, p, q, dt)
    return float(np.max(value))


def windowed_history(e_history: np.ndarray, params: OracleParams, n_last: int):
    """Restrict a full history ``(steps, N)`` of e_1..e_N to steps ``0..n_last``
    and to the vehicles inside the validity window at ``n_last``.

    Returns ``(history, vehicles, notes)``; ``notes`` records an empty window
    instead of silently returning zeros.
    """
    vehicles = validity_window(params, n_last * params.dt)
    notes = []
    if len(vehicles) == 0:
        msg = f"validity window empty at N={params.N}, step {n_last}; contribution skipped"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    cols = np.asarray(vehicles, dtype=int) - 1
    return np.asarray(e_history)[: n_last + 1, cols], vehicles, notes


def theorem2_exponent(definition_id: int, p: int = 2, q: int = 2) -> float:
    """Growth exponent in N of the error metric under the saturating ramp."""
    check_criterion(definition_id, p, q)
    if definition_id == 1:
        return p - p / q
    if definition_id == 2:
        return float(q)
    if definition_id == 3:
        return float(p)
    return 1.0


def fit_exponent(samples) -> float:
    """Least-squares slope of ``log(metric)`` against ``log(N)``."""
    pairs = sorted((float(n), float(m)) for n, m in samples)
    if len(pairs) < 3:
        raise FitError("need at least 3 samples")
    N = np.array([n for n, _ in pairs])
    metric = np.array([m for _, m in pairs])
    if len(np.unique(N)) != len(N):
        raise FitError("N values must be distinct")
    if np.any(N <= 0) or np.any(~(metric > 0)):
        raise FitError("N and metric values must be positive")
    slope, _ = np.polyfit(np.log(N), np.log(metric), 1)
    return float(slope)


@dataclass
class ScalingReport:
    definition_id: int
    p: int
    q: int
    samples: list = field(default_factory=list)
    fitted_exponent: float = float("nan")
    reference_exponent: float = float("nan")

    @classmethod
    def from_samples(cls, definition_id: int, p: int, q: int, samples) -> "ScalingReport":
        samples = sorted((int(n), float(m)) for n, m in samples)
        return cls(
            definition_id, p, q, samples,
            fit_exponent(samples), theorem2_exponent(definition_id, p, q),
        )

    @property
    def deviation(self) -> float:
        return abs(self.fitted_exponent - self.reference_exponent)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["samples"] = [list(s) for s in self.samples]
        return out


__all__ = [
    "RAMP_ERROR_SIGN", "FitError", "OracleParams", "ParameterError", "ScalingReport",
    "error_metric", "fig2_steps", "fit_exponent", "lemma1_oracle", "lemma_window_T",
    "lemma_window_steps", "oracle_series", "oracle_spacing", "summary_metric",
    "theorem2_exponent", "validity_window", "windowed_history",
]
