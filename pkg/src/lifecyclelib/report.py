#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Reports
-------

:func:`render_report` renders the result of any solver as text.

In ``"human"`` mode money amounts are shown with a fixed number of decimals
(:attr:`~lifecyclelib.config.Settings.precision`), and states, actions, and policies are numbered from one.
In ``"machine"`` mode the result is emitted as a JSON document with a ``"report"`` tag.
Its numbers have full precision: parsing the document gives back exactly the values of the result.

.. autofunction:: render_report
"""

from __future__ import annotations

import json
from typing import Any, Union

from lifecyclelib.config import Settings
from lifecyclelib.howard import IterationStep, IterationTrace
from lifecyclelib.model import ControlledMarkovProblem, GrowthIndicators, PolicyVector
from lifecyclelib.stages import StagedModel, StageValues, evaluate_initial
from lifecyclelib.tree import Chance, Decision, RolledBackTree, Terminal, optimal_strategy
from lifecyclelib.validation import EnumerationResult, SimulationReport

Result = Union[IterationTrace, EnumerationResult, SimulationReport, RolledBackTree, StageValues, GrowthIndicators]

MODES = ("human", "machine")
POLICY_ITERATION_HEADER = "Policy iteration"


def render_report(
    result: Result,
    mode: str = "human",
    *,
    settings: Settings | None = None,
    source: ControlledMarkovProblem | StagedModel | None = None,
    trace: bool = False,
) -> str:
    """Render a solver result.

    Args:
        result: The result to render.
        mode: ``"human"`` or ``"machine"``.
        settings: Output settings. Defaults to :meth:`Settings.from_environment`.
        source: The model the result was computed from. Required for :class:`~lifecyclelib.stages.StageValues`;
            for an :class:`~lifecyclelib.howard.IterationTrace` it adds action labels to the final policy.
        trace: Include the improvement tables of a policy-iteration trace in human mode.

    Returns:
        The rendered text, ending with a newline.

    Raises:
        ValueError: if the mode is unknown.
        TypeError: if the result type is not supported, or a required `source` is missing.
    """
    if mode not in MODES:
        error_msg = f"unknown report mode {mode!r}; expected one of {', '.join(MODES)}"
        raise ValueError(error_msg)
    if isinstance(result, StageValues) and not isinstance(source, StagedModel):
        error_msg = "rendering stage values requires the staged model as source"
        raise TypeError(error_msg)

    if mode == "machine":
        return json.dumps(_document(result, source), indent=2) + "\n"

    precision = (settings or Settings.from_environment()).precision
    fmt = _Formatter(precision)
    if isinstance(result, IterationTrace):
        lines = _trace_lines(result, fmt, source if isinstance(source, ControlledMarkovProblem) else None, trace)
    elif isinstance(result, EnumerationResult):
        lines = _enumeration_lines(result, fmt)
    elif isinstance(result, SimulationReport):
        lines = _simulation_lines(result, fmt)
    elif isinstance(result, RolledBackTree):
        lines = _tree_lines(result, fmt)
    elif isinstance(result, StageValues):
        assert isinstance(source, StagedModel)
        lines = _stage_lines(result, source, fmt)
    elif isinstance(result, GrowthIndicators):
        lines = _growth_lines(result, fmt)
    else:
        error_msg = f"cannot render {type(result).__name__}"
        raise TypeError(error_msg)
    return "\n".join(lines) + "\n"


class _Formatter:
    def __init__(self, precision: int):
        self.precision = precision

    def __call__(self, value: float | None) -> str:
        return "-" if value is None else f"{value:.{self.precision}f}"

    def vector(self, values: tuple[float, ...]) -> str:
        return "  ".join(self(v) for v in values)


def _policy(policy: PolicyVector | None) -> str:
    return "-" if policy is None else str(policy)


def _trace_lines(
    result: IterationTrace, fmt: _Formatter, problem: ControlledMarkovProblem | None, trace: bool
) -> list[str]:
    lines = [POLICY_ITERATION_HEADER]
    for number, step in enumerate(result.steps, start=1):
        lines.append(f"Iteration {number}")
        lines.append(f"  policy:          {step.policy}")
        lines.append(f"  gain:            {fmt(step.solution.gain)}")
        lines.append(f"  relative values: {fmt.vector(step.solution.v)}")
        if trace:
            lines.extend(_improvement_lines(step, fmt))
        lines.append(f"  improved policy: {step.improvement.chosen}")
    if not result.steps:
        return lines

    status = "converged" if result.converged else "not converged"
    lines.append(f"Final policy: {_policy(result.final_policy)} ({status} after {len(result.steps)} iterations)")
    if problem is not None and result.final_policy is not None:
        for state, action in enumerate(result.final_policy.choice):
            label = problem.actions[state][action].label
            lines.append(f"  {problem.state_labels[state]}: action {action + 1} ({label})")
    lines.append(f"Gain: {fmt(result.gain)}")
    return lines


def _improvement_lines(step: IterationStep, fmt: _Formatter) -> list[str]:
    width = max(len(fmt(value)) for _, _, value, _ in step.improvement.marked())
    lines = [f"  {'state':>5}  {'action':>6}  {'test value':>{width}}"]
    for state, action, value, chosen in step.improvement.marked():
        marker = "  +" if chosen else ""
        lines.append(f"  {state:>5}  {action:>6}  {fmt(value):>{width}}{marker}")
    return lines


def _enumeration_lines(result: EnumerationResult, fmt: _Formatter) -> list[str]:
    lines = [
        "Exhaustive enumeration",
        f"  policies evaluated:   {result.evaluated}",
        f"  skipped (multichain): {len(result.skipped)}",
        f"  best policy:          {_policy(result.best_policy)}",
        f"  best gain:            {fmt(result.best_gain)}",
    ]
    lines.extend(f"  skipped: {policy}" for policy in result.skipped)
    return lines


def _simulation_lines(result: SimulationReport, fmt: _Formatter) -> list[str]:
    frequencies = "  ".join(f"{f:.6f}" for f in result.state_visit_frequencies)
    return [
        "Simulation",
        f"  seed:            {result.seed}",
        f"  steps:           {result.steps}",
        f"  start state:     {result.start_state + 1}",
        f"  empirical gain:  {fmt(result.empirical_gain)}",
        f"  total reward:    {fmt(result.total_reward)}",
        f"  visit frequency: {frequencies}",
    ]


def _tree_lines(result: RolledBackTree, fmt: _Formatter) -> list[str]:
    lines = ["Decision tree", f"  value: {fmt(result.value)}"]
    _node_lines(result, "", fmt, lines, indent="  ")
    strategy = optimal_strategy(result)
    if strategy:
        lines.append("Optimal strategy")
        lines.extend(f"  {path}: {label}" for path, label in strategy.items())
    return lines


def _node_lines(rolled: RolledBackTree, heading: str, fmt: _Formatter, lines: list[str], indent: str) -> None:
    node = rolled.node
    kind = type(node).__name__.lower()
    name = f" {node.label}" if node.label else ""
    lines.append(f"{indent}{heading}[{kind}{name}] value {fmt(rolled.value)}, total {fmt(rolled.expected_total)}")
    if isinstance(node, Decision):
        for index, (branch, child) in enumerate(zip(node.branches, rolled.children)):
            marker = "* " if index == rolled.optimal_branch else "  "
            label = branch.label or str(index + 1)
            _node_lines(child, f"{marker}{label} ({fmt(branch.cash_adjustment)}): ", fmt, lines, indent + "  ")
    elif isinstance(node, Chance):
        for index, (chance_branch, child) in enumerate(zip(node.branches, rolled.children)):
            label = chance_branch.label or str(index + 1)
            _node_lines(child, f"{label} (p={chance_branch.probability:g}): ", fmt, lines, indent + "  ")


def _stage_lines(result: StageValues, model: StagedModel, fmt: _Formatter) -> list[str]:
    lines = ["Backward induction"]
    for stage, labels in enumerate(model.stages):
        lines.append(f"Stage {stage}")
        for label in labels:
            value = fmt(result.value(stage, label))
            if stage < model.horizon:
                lines.append(f"  {label}: {value} ({result.optimal_label(model, stage, label)})")
            else:
                lines.append(f"  {label}: {value}")
    lines.append(f"Initial value: {fmt(evaluate_initial(model, result))}")
    lines.extend(f"Warning: {warning}" for warning in model.warnings)
    return lines


def _growth_lines(result: GrowthIndicators, fmt: _Formatter) -> list[str]:
    return [
        f"t:            {result.t:g}",
        f"x:            {result.x:g}",
        f"rate:         {fmt(result.rate)}",
        f"acceleration: {fmt(result.acceleration)}",
        f"state:        {result.state.value}",
    ]


def _external(policy: PolicyVector | None) -> list[int] | None:
    return None if policy is None else list(policy.to_external())


def _document(result: Result, source: ControlledMarkovProblem | StagedModel | None) -> dict[str, Any]:
    if isinstance(result, IterationTrace):
        return {
            "report": "policy-iteration",
            "converged": result.converged,
            "final_policy": _external(result.final_policy),
            "gain": result.gain,
            "iterations": [
                {
                    "policy": _external(step.policy),
                    "gain": step.solution.gain,
                    "v": list(step.solution.v),
                    "reference_state": step.solution.reference_state + 1,
                    "q": list(step.q),
                    "residual": step.residual,
                    "test_values": [list(values) for values in step.improvement.test_values],
                    "improved_policy": _external(step.improvement.chosen),
                }
                for step in result.steps
            ],
        }
    if isinstance(result, EnumerationResult):
        return {
            "report": "enumeration",
            "evaluated": result.evaluated,
            "best_policy": _external(result.best_policy),
            "best_gain": result.best_gain,
            "skipped": [_external(policy) for policy in result.skipped],
        }
    if isinstance(result, SimulationReport):
        return {
            "report": "simulation",
            "seed": result.seed,
            "steps": result.steps,
            "start_state": result.start_state + 1,
            "empirical_gain": result.empirical_gain,
            "total_reward": result.total_reward,
            "state_visit_frequencies": list(result.state_visit_frequencies),
            "transition_counts": [list(row) for row in result.transition_counts],
            "end_state": result.end_state + 1,
        }
    if isinstance(result, RolledBackTree):
        return {"report": "tree", "value": result.value, "strategy": optimal_strategy(result), "root": _node(result)}
    if isinstance(result, StageValues):
        assert isinstance(source, StagedModel)
        return {
            "report": "stages",
            "initial_value": evaluate_initial(source, result),
            "warnings": list(source.warnings),
            "states": [
                {
                    "stage": stage,
                    "state": label,
                    "value": result.value(stage, label),
                    "control": result.optimal_label(source, stage, label) if stage < source.horizon else None,
                    "control_values": list(result.control_values.get((stage, label), ())),
                }
                for stage, labels in enumerate(source.stages)
                for label in labels
            ],
        }
    if isinstance(result, GrowthIndicators):
        return {
            "report": "growth",
            "t": result.t,
            "x": result.x,
            "rate": result.rate,
            "acceleration": result.acceleration,
            "state": result.state.value,
        }
    error_msg = f"cannot render {type(result).__name__}"
    raise TypeError(error_msg)


def _node(rolled: RolledBackTree) -> dict[str, Any]:
    node = rolled.node
    document: dict[str, Any] = {
        "type": type(node).__name__.lower(),
        "label": node.label,
        "value": rolled.value,
        "accrued": rolled.accrued,
        "expected_total": rolled.expected_total,
    }
    if isinstance(node, Terminal):
        return document
    if isinstance(node, Decision):
        document["optimal_branch"] = rolled.optimal_branch
        document["branches"] = [
            {"label": branch.label, "adjustment": branch.cash_adjustment, "node": _node(child)}
            for branch, child in zip(node.branches, rolled.children)
        ]
    else:
        document["branches"] = [
            {"label": branch.label, "probability": branch.probability, "node": _node(child)}
            for branch, child in zip(node.branches, rolled.children)
        ]
    return document
