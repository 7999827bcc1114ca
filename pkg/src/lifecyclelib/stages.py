#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Staged models
-------------

A :class:`StagedModel` is a finite-horizon decision process with stages ``0, ..., T``.
Each stage has a finite set of states. In every non-final state ``x`` the owner chooses
a control ``u`` from the non-empty set ``U(x)``. The control yields an immediate reward
``r(u)`` and determines the probability distribution of the state at the next stage.
Final states carry a terminal reward ``r(x)``.
The initial state is drawn from the initial distribution ``μ``.

Each control belongs to exactly one state. Control labels must therefore be unique
within a stage; the owning state of a control is the state it is listed under.

A deterministic model is the special case in which every control leads to one next state
with probability one.

:func:`backward_induction` computes the optimal value of every state, from the final stage backwards.

.. autoclass:: Control
.. autoclass:: StagedModel
   :members: horizon, state_index

.. autoclass:: StageResult
.. autoclass:: StageValues
   :members: value, optimal_label

.. autofunction:: validate_staged_model
.. autofunction:: backward_step
.. autofunction:: backward_induction
.. autofunction:: evaluate_initial
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Mapping, Tuple

from lifecyclelib.config import ROW_SUM_TOLERANCE
from lifecyclelib.errors import (
    DuplicateLabel,
    EmptyActionSet,
    NegativeProbability,
    NonFiniteValue,
    RowSumError,
    ShapeMismatch,
    UnknownState,
    ValidationError,
)

logger = logging.getLogger(__name__)

#: A state address: (stage, state label).
StateKey = Tuple[int, str]


@dataclass(frozen=True)
class Control:
    """A control available in one state.

    Attributes:
        label: Name of the control; unique within its stage.
        reward: Immediate reward ``r(u)``.
        distribution: ``(next state label, probability)`` pairs over the states of the next stage.
            States that are not listed have probability zero.
    """

    label: str
    reward: float
    distribution: tuple[tuple[str, float], ...]

    @property
    def total_probability(self) -> float:
        """The sum of the distribution's probabilities."""
        return math.fsum(p for _, p in self.distribution)


@dataclass(frozen=True)
class StagedModel:
    """A finite-horizon staged decision model.

    Attributes:
        stages: State labels of every stage ``0, ..., T``.
        controls: For every non-final stage, and every state of that stage (in order), its controls.
        terminal_rewards: Reward of every state of the final stage (in order).
        initial_distribution: Probability of every state of stage 0 (in order).
        allow_substochastic: Accept control distributions that sum to less than one.
        annotation: Free-text note, e.g. explaining why sub-stochastic distributions are allowed.
        warnings: Warnings produced by :func:`validate_staged_model`.
    """

    stages: tuple[tuple[str, ...], ...]
    controls: tuple[tuple[tuple[Control, ...], ...], ...]
    terminal_rewards: tuple[float, ...]
    initial_distribution: tuple[float, ...]
    allow_substochastic: bool = False
    annotation: str = ""
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def horizon(self) -> int:
        """The final stage ``T``."""
        return len(self.stages) - 1

    @cached_property
    def _indices(self) -> tuple[dict[str, int], ...]:
        return tuple({label: index for index, label in enumerate(labels)} for labels in self.stages)

    def state_index(self, stage: int, label: str) -> int:
        """The position of a state within its stage.

        Raises:
            KeyError: if the stage has no such state.
        """
        return self._indices[stage][label]


@dataclass(frozen=True)
class StageResult:
    """Values of the states of one stage.

    Attributes:
        values: Optimal value per state label.
        optimal_control: Index of the optimal control per state label (empty for the final stage).
        control_values: Value of every control per state label (empty for the final stage).
    """

    values: Dict[str, float]
    optimal_control: Dict[str, int]
    control_values: Dict[str, Tuple[float, ...]]


@dataclass(frozen=True)
class StageValues:
    """Optimal values and controls of every state of a staged model.

    Attributes:
        values: Optimal value ``v(x)`` per state.
        optimal_control: Index of the optimal control per non-final state.
        control_values: ``r(u) + sum p(x'|u) v(x')`` for every control of every non-final state.
    """

    values: Dict[StateKey, float]
    optimal_control: Dict[StateKey, int]
    control_values: Dict[StateKey, Tuple[float, ...]]

    def value(self, stage: int, label: str) -> float:
        """The optimal value of a state."""
        return self.values[(stage, label)]

    def optimal_label(self, model: StagedModel, stage: int, label: str) -> str:
        """The label of the optimal control of a non-final state."""
        return model.controls[stage][model.state_index(stage, label)][self.optimal_control[(stage, label)]].label


def validate_staged_model(model: StagedModel, *, tolerance: float = ROW_SUM_TOLERANCE) -> StagedModel:
    """Check the invariants of a staged model.

    If the model allows sub-stochastic controls, a control distribution that sums to less than one
    is accepted with a warning instead of an error.

    Args:
        model: The candidate model.
        tolerance: Allowed deviation of a distribution's sum from one.

    Returns:
        The model, with :attr:`~StagedModel.warnings` filled in.

    Raises:
        ValidationError: describing every violation.
    """
    violations: list[ValidationError] = []
    warnings: list[str] = []
    if not model.stages:
        violations.append(EmptyActionSet("model has no stages"))
        ValidationError.collect(violations)

    for t, labels in enumerate(model.stages):
        if not labels:
            violations.append(EmptyActionSet("stage has no states", location=f"stage {t}"))
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            violations.append(DuplicateLabel(f"duplicate state labels {duplicates}", location=f"stage {t}"))

    if len(model.controls) != model.horizon:
        error_msg = f"control lists for {len(model.controls)} stages, expected {model.horizon}"
        violations.append(ShapeMismatch(error_msg))
    for t, stage_controls in enumerate(model.controls[: model.horizon]):
        violations.extend(_stage_violations(model, t, stage_controls, tolerance, warnings))

    if len(model.terminal_rewards) != len(model.stages[-1]):
        error_msg = f"{len(model.terminal_rewards)} terminal rewards for {len(model.stages[-1])} final states"
        violations.append(ShapeMismatch(error_msg))
    if not all(math.isfinite(r) for r in model.terminal_rewards):
        violations.append(NonFiniteValue("terminal rewards must be finite"))

    if len(model.initial_distribution) != len(model.stages[0]):
        error_msg = f"{len(model.initial_distribution)} initial probabilities for {len(model.stages[0])} states"
        violations.append(ShapeMismatch(error_msg))
    elif not all(0.0 <= p <= 1.0 for p in model.initial_distribution):
        violations.append(NegativeProbability("initial distribution has a probability outside [0, 1]"))
    elif abs(math.fsum(model.initial_distribution) - 1.0) > tolerance:
        violations.append(RowSumError(f"initial distribution sums to {math.fsum(model.initial_distribution)!r}"))

    ValidationError.collect(violations)
    for warning in warnings:
        logger.warning(warning)
    return replace(model, warnings=tuple(warnings))


def _stage_violations(
    model: StagedModel,
    t: int,
    stage_controls: tuple[tuple[Control, ...], ...],
    tolerance: float,
    warnings: list[str],
) -> list[ValidationError]:
    violations: list[ValidationError] = []
    labels = model.stages[t]
    if len(stage_controls) != len(labels):
        error_msg = f"control sets for {len(stage_controls)} states, stage has {len(labels)}"
        violations.append(ShapeMismatch(error_msg, location=f"stage {t}"))
        return violations

    next_states = set(model.stages[t + 1])
    seen: set[str] = set()
    for label, controls in zip(labels, stage_controls):
        if not controls:
            violations.append(EmptyActionSet("state has no controls", location=f"stage {t}, state {label}"))
        for control in controls:
            location = f"stage {t}, state {label}, control {control.label}"
            if control.label in seen:
                violations.append(DuplicateLabel("control label is used by more than one state", location=location))
            seen.add(control.label)
            if not math.isfinite(control.reward):
                violations.append(NonFiniteValue("reward is not finite", location=location))
            unknown = [target for target, _ in control.distribution if target not in next_states]
            if unknown:
                violations.append(UnknownState(f"unknown next states {unknown}", location=location))
            probabilities = [p for _, p in control.distribution]
            if not all(0.0 <= p <= 1.0 for p in probabilities):
                violations.append(NegativeProbability("probability outside [0, 1]", location=location))
                continue
            total = control.total_probability
            if model.allow_substochastic and total < 1.0 - tolerance:
                warnings.append(f"{location}: sub-stochastic distribution sums to {total!r}")
            elif abs(total - 1.0) > tolerance:
                violations.append(RowSumError(f"distribution sums to {total!r}, not 1", location=location))
    return violations


def backward_step(model: StagedModel, stage: int, next_values: Mapping[str, float]) -> StageResult:
    """Compute the optimal values of one non-final stage from the values of the next stage.

    The value of a control is ``r(u) + sum p(x'|u) v(x')``. The value of a state is the maximum
    over its controls; ties are broken towards the earliest listed control.

    Args:
        model: A valid model.
        stage: The stage to compute, ``0 <= stage < T``.
        next_values: Value of every state of stage ``stage + 1``, by label.

    Returns:
        The values of the states of `stage`.
    """
    values: dict[str, float] = {}
    optimal: dict[str, int] = {}
    per_control: dict[str, tuple[float, ...]] = {}
    for label, controls in zip(model.stages[stage], model.controls[stage]):
        control_values = tuple(
            control.reward + sum(p * next_values[target] for target, p in control.distribution) for control in controls
        )
        best = 0
        for index, candidate in enumerate(control_values):
            if candidate > control_values[best]:
                best = index
        values[label] = control_values[best]
        optimal[label] = best
        per_control[label] = control_values
    return StageResult(values=values, optimal_control=optimal, control_values=per_control)


def backward_induction(model: StagedModel) -> StageValues:
    """Compute the optimal value and control of every state by backward induction.

    Args:
        model: A valid model.

    Returns:
        The values of all states: ``v(x) = r(x)`` on the final stage, and
        ``v(x) = max over u in U(x) of r(u) + sum p(x'|u) v(x')`` elsewhere.
    """
    horizon = model.horizon
    next_values = dict(zip(model.stages[horizon], model.terminal_rewards))
    values: dict[StateKey, float] = {(horizon, label): value for label, value in next_values.items()}
    optimal: dict[StateKey, int] = {}
    control_values: dict[StateKey, tuple[float, ...]] = {}

    for stage in range(horizon - 1, -1, -1):
        result = backward_step(model, stage, next_values)
        for label, value in result.values.items():
            values[(stage, label)] = value
            optimal[(stage, label)] = result.optimal_control[label]
            control_values[(stage, label)] = result.control_values[label]
        logger.debug("Stage %d values: %r", stage, result.values)
        next_values = result.values

    return StageValues(values=values, optimal_control=optimal, control_values=control_values)


def evaluate_initial(model: StagedModel, values: StageValues) -> float:
    """The expected optimal value under the initial distribution: ``sum μ(x) v(x)`` over stage 0."""
    return sum(mu * values.value(0, label) for label, mu in zip(model.stages[0], model.initial_distribution))
