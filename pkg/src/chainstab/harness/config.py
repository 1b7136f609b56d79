"""JSON experiment configuration.

Example::

    {
      "schema_version": "1",
      "sim": {"N": 50, "dt": 0.1, "horizon": "lemma-window"},
      "controller": {"name": "pd_asymmetric", "params": {"a": 1, "b1": 2, "b2": 0.5}},
      "disturbance": {"kind": "ramp-windowed", "budget": {"definition_id": 4}, "T": "lemma-window"},
      "criterion": {"definition_id": 4}
    }

Unknown keys anywhere are rejected.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..analysis import fig2_steps, lemma_window_steps
from ..controllers import BUILTIN, ControllerDefinition, make_controller
from ..core import ConfigurationError, SimulationConfig, grid_steps
from ..disturbances import KINDS, ZERO, AmplitudeBudget, DisturbanceProfile, admissible_alpha

SCHEMA_VERSION = "1"


class ConfigError(ConfigurationError):
    """Invalid experiment configuration; the message names the field path."""


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class StepsRule(_Section):
    steps: int = Field(ge=1)


class TimeRule(_Section):
    time: float = Field(gt=0)


WindowRule = Literal["lemma-window", "fig2"]


class SimSection(_Section):
    N: Optional[int] = Field(default=None, ge=1)
    N_list: Optional[list[int]] = None
    dt: float = Field(gt=0)
    horizon: Union[WindowRule, StepsRule, TimeRule] = "lemma-window"

    @model_validator(mode="after")
    def _one_size(self):
        if (self.N is None) == (self.N_list is None):
            raise ValueError("give exactly one of N or N_list")
        if self.N_list is not None and (not self.N_list or min(self.N_list) < 1):
            raise ValueError("N_list entries must be integers >= 1")
        return self

    @property
    def sizes(self) -> list[int]:
        return sorted(set(self.N_list)) if self.N_list is not None else [self.N]


class ControllerSection(_Section):
    name: Literal[tuple(BUILTIN)]
    params: dict[str, float] = Field(default_factory=dict)


class BudgetSection(_Section):
    definition_id: Literal[1, 2, 3, 4]
    p: int = Field(default=2, ge=1)
    q: int = Field(default=2, ge=1)
    C1: float = Field(default=1.0, gt=0)

    def budget(self) -> AmplitudeBudget:
        return AmplitudeBudget(self.definition_id, self.p, self.q, self.C1)


class DisturbanceSection(_Section):
    kind: Literal[KINDS]
    alpha: Optional[float] = Field(default=None, ge=0)
    budget: Optional[BudgetSection] = None
    T: Union[WindowRule, float, None] = None

    @model_validator(mode="after")
    def _amplitude(self):
        if self.kind != ZERO and (self.alpha is None) == (self.budget is None):
            raise ValueError("give exactly one of alpha or budget")
        if self.kind == "ramp-windowed" and self.T is None:
            raise ValueError("ramp-windowed needs T")
        if self.budget is not None and self.T is None:
            raise ValueError("budget mode needs T")
        return self


class OutputsSection(_Section):
    trajectory_csv: Optional[str] = None
    report_json: Optional[str] = None
    plot_data: Optional[str] = None


class ExperimentConfig(_Section):
    schema_version: Literal["1"]
    sim: SimSection
    controller: ControllerSection
    disturbance: DisturbanceSection
    criterion: BudgetSection = BudgetSection(definition_id=4)
    outputs: OutputsSection = OutputsSection()
    oracle_only: bool = False

    # resolution ------------------------------------------------------------

    def make_controller(self) -> ControllerDefinition:
        try:
            return make_controller(self.controller.name, dict(self.controller.params), self.sim.dt)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"controller.params: {exc}") from None

    def window_steps(self, N: int) -> int | None:
        """Disturbance window end in steps, or None when no T rule is set."""
        rule = self.disturbance.T
        if rule is None:
            return None
        if rule == "lemma-window":
            ctrl = self.make_controller()
            return lemma_window_steps(N, ctrl.m1, ctrl.m2)
        if rule == "fig2":
            return fig2_steps(N)
        try:
            return grid_steps(rule, self.sim.dt)
        except ValueError as exc:
            raise ConfigError(f"disturbance.T: {exc}") from None

    def horizon_steps(self, N: int) -> int:
        rule = self.sim.horizon
        if rule == "lemma-window":
            ctrl = self.make_controller()
            steps = lemma_window_steps(N, ctrl.m1, ctrl.m2)
        elif rule == "fig2":
            steps = fig2_steps(N)
        elif isinstance(rule, StepsRule):
            steps = rule.steps
        else:
            steps = math.floor(rule.time / self.sim.dt + 1e-9)
        window = self.window_steps(N)
        if window is not None and steps < window:
            raise ConfigError(f"sim.horizon: resolves to {steps} steps, shorter than the T window ({window})")
        if steps < 1:
            raise ConfigError(f"sim.horizon: resolves to {steps} steps at N={N}")
        return steps

    def alpha(self, N: int) -> float:
        d = self.disturbance
        if d.kind == ZERO:
            return 0.0
        if d.alpha is not None:
            return d.alpha
        n_T = self.window_steps(N)
        if n_T < 1:
            raise ConfigError(f"disturbance.T: window is empty at N={N}")
        return admissible_alpha(d.budget.budget(), N, n_T * self.sim.dt, self.sim.dt)

    def profile(self, N: int) -> DisturbanceProfile:
        n_T = self.window_steps(N)
        T = None if n_T is None else n_T * self.sim.dt
        return DisturbanceProfile(self.disturbance.kind, self.alpha(N), T)

    def simulation(self, N: int) -> SimulationConfig:
        return SimulationConfig(N, self.sim.dt, self.horizon_steps(N))

    # serialization -----------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)


def _format(err: ValidationError) -> str:
    lines = []
    for item in err.errors():
        path = ".".join(str(p) for p in item["loc"]) or "<root>"
        lines.append(f"{path}: {item['msg']}")
    return "; ".join(lines)


def parse_config(data: dict | str) -> ExperimentConfig:
    """Validate a config mapping or JSON string."""
    try:
        if isinstance(data, str):
            return ExperimentConfig.model_validate_json(data)
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format(exc)) from None


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
