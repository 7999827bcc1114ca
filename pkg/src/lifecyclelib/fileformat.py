#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Problem files
-------------

Problem files are JSON documents with a top-level ``"kind"`` tag.

``"mdp"``
   A controlled Markov problem::

      {"kind": "mdp",
       "states": ["A", "B"],
       "actions": [[{"label": "keep", "p": [0.5, 0.5], "r": [1, 2]}, ...], ...],
       "annotation": ""}

``"tree"``
   A decision tree. Nodes have a ``"type"`` of ``"decision"``, ``"chance"``, or ``"terminal"``::

      {"kind": "tree",
       "root": {"type": "decision", "label": "launch",
                "branches": [{"label": "go", "adjustment": -10, "node": {...}}, ...]}}

   Chance branches carry a ``"probability"`` instead of an ``"adjustment"``,
   terminal nodes carry a ``"payoff"``.

``"staged"``
   A staged model. ``"controls"`` has one mapping per non-final stage, from state label to its controls.
   Probabilities may be written as numbers or as exact fractions such as ``"3/10"``::

      {"kind": "staged",
       "stages": [["I"], ["T1", "T2"]],
       "controls": [{"I": [{"label": "u1", "reward": 1, "dist": {"T1": "1/2", "T2": "1/2"}}]}],
       "terminal_rewards": {"T1": 1, "T2": 2},
       "initial": {"I": 1},
       "allow_substochastic": false,
       "annotation": ""}

Every model is validated after parsing.

.. autofunction:: parse_problem_file
.. autofunction:: parse_document
.. autofunction:: to_document
.. autofunction:: dump_problem
.. autofunction:: dataset_path
"""

from __future__ import annotations

import json
import logging
import math
import os
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, Mapping, Sequence, Union

from lifecyclelib.errors import ParseError
from lifecyclelib.model import ControlledMarkovProblem
from lifecyclelib.stages import Control, StagedModel, validate_staged_model
from lifecyclelib.tree import Chance, ChanceBranch, Decision, DecisionBranch, Terminal, TreeNode, validate_tree

if TYPE_CHECKING:
    from importlib.abc import Traversable

logger = logging.getLogger(__name__)

Model = Union[ControlledMarkovProblem, TreeNode, StagedModel]

KINDS = ("mdp", "tree", "staged")
DATASETS = ("dealership.mdp", "product-launch.tree", "staged-example.staged", "deterministic-example.staged")


class _Document:
    """Typed access to the fields of a parsed JSON document, with field paths for error messages."""

    def __init__(self, path: str | None):
        self.path = path

    def fail(self, message: str, field: str) -> ParseError:
        return ParseError(message, path=self.path, field=field)

    def mapping(self, value: Any, field: str) -> Mapping[str, Any]:
        if not isinstance(value, dict):
            raise self.fail("expected an object", field)
        return value

    def sequence(self, value: Any, field: str) -> Sequence[Any]:
        if not isinstance(value, list):
            raise self.fail("expected an array", field)
        return value

    def member(self, container: Mapping[str, Any], key: str, field: str) -> Any:
        if key not in container:
            raise self.fail("missing field", f"{field}.{key}" if field else key)
        return container[key]

    def text(self, value: Any, field: str) -> str:
        if not isinstance(value, str):
            raise self.fail("expected a string", field)
        return value

    def number(self, value: Any, field: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(f"expected a number, got {value!r}", field)
        return float(value)

    def probability(self, value: Any, field: str) -> float:
        if isinstance(value, str):
            try:
                return float(Fraction(value))
            except (ValueError, ZeroDivisionError):
                raise self.fail(f"invalid fraction {value!r}", field) from None
        return self.number(value, field)


def _read_text(path: str | os.PathLike[str] | Traversable) -> tuple[str, str]:
    source = Path(path) if isinstance(path, (str, os.PathLike)) else path
    try:
        return source.read_text(encoding="utf-8"), str(path)
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not valid UTF-8: {exc}", path=str(path)) from exc


def parse_problem_file(path: str | os.PathLike[str] | Traversable) -> Model:
    """Read and validate a problem file.

    Args:
        path: Location of the file.

    Returns:
        The validated model: a :class:`~lifecyclelib.model.ControlledMarkovProblem`,
        a decision tree, or a :class:`~lifecyclelib.stages.StagedModel`.

    Raises:
        ParseError: if the file is not a well-formed problem document.
        ValidationError: if the model violates its invariants.
        OSError: if the file cannot be read.
    """
    text, name = _read_text(path)
    return parse_document(text, path=name)


def parse_document(text: str, *, path: str | None = None) -> Model:
    """Parse and validate a problem document.

    Args:
        text: The JSON text.
        path: File name used in error messages.

    Returns:
        The validated model.

    Raises:
        ParseError: if the text is not a well-formed problem document.
        ValidationError: if the model violates its invariants.
    """
    if not text.strip():
        raise ParseError("file is empty", path=path)
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path=path, line=exc.lineno, column=exc.colno) from exc
    except ValueError as exc:
        raise ParseError(str(exc), path=path) from exc

    doc = _Document(path)
    top = doc.mapping(raw, "")
    kind = doc.member(top, "kind", "")
    if kind == "mdp":
        return _parse_mdp(doc, top)
    if kind == "tree":
        return validate_tree(_parse_node(doc, doc.member(top, "root", ""), "root"))
    if kind == "staged":
        return _parse_staged(doc, top)
    raise doc.fail(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", "kind")


def _reject_constant(name: str) -> float:
    error_msg = f"non-finite number {name} is not allowed"
    raise ValueError(error_msg)


def _parse_mdp(doc: _Document, top: Mapping[str, Any]) -> ControlledMarkovProblem:
    raw_states = doc.sequence(doc.member(top, "states", ""), "states")
    states = [doc.text(label, f"states[{i}]") for i, label in enumerate(raw_states)]
    rows = []
    for i, state_actions in enumerate(doc.sequence(doc.member(top, "actions", ""), "actions")):
        state_rows = []
        for k, action in enumerate(doc.sequence(state_actions, f"actions[{i}]")):
            field = f"actions[{i}][{k}]"
            entry = doc.mapping(action, field)
            label = doc.text(entry.get("label", str(k + 1)), f"{field}.label")
            raw_p = doc.sequence(doc.member(entry, "p", field), f"{field}.p")
            raw_r = doc.sequence(doc.member(entry, "r", field), f"{field}.r")
            p = [doc.probability(x, f"{field}.p[{j}]") for j, x in enumerate(raw_p)]
            r = [doc.number(x, f"{field}.r[{j}]") for j, x in enumerate(raw_r)]
            state_rows.append((label, p, r))
        rows.append(state_rows)
    annotation = doc.text(top.get("annotation", ""), "annotation")
    return ControlledMarkovProblem.from_rows(rows, state_labels=states, annotation=annotation)


def _parse_node(doc: _Document, raw: Any, field: str) -> TreeNode:
    entry = doc.mapping(raw, field)
    node_type = doc.member(entry, "type", field)
    label = doc.text(entry.get("label", ""), f"{field}.label")
    if node_type == "terminal":
        return Terminal(doc.number(doc.member(entry, "payoff", field), f"{field}.payoff"), label=label)
    branches = doc.sequence(doc.member(entry, "branches", field), f"{field}.branches")
    if node_type == "decision":
        decision_branches = []
        for b, raw_branch in enumerate(branches):
            branch_field = f"{field}.branches[{b}]"
            branch = doc.mapping(raw_branch, branch_field)
            decision_branches.append(
                DecisionBranch(
                    label=doc.text(branch.get("label", ""), f"{branch_field}.label"),
                    cash_adjustment=doc.number(branch.get("adjustment", 0), f"{branch_field}.adjustment"),
                    child=_parse_node(doc, doc.member(branch, "node", branch_field), f"{branch_field}.node"),
                )
            )
        return Decision(tuple(decision_branches), label=label)
    if node_type == "chance":
        chance_branches = []
        for b, raw_branch in enumerate(branches):
            branch_field = f"{field}.branches[{b}]"
            branch = doc.mapping(raw_branch, branch_field)
            probability = doc.member(branch, "probability", branch_field)
            chance_branches.append(
                ChanceBranch(
                    probability=doc.probability(probability, f"{branch_field}.probability"),
                    child=_parse_node(doc, doc.member(branch, "node", branch_field), f"{branch_field}.node"),
                    label=doc.text(branch.get("label", ""), f"{branch_field}.label"),
                )
            )
        return Chance(tuple(chance_branches), label=label)
    raise doc.fail(f"unknown node type {node_type!r}", f"{field}.type")


def _parse_staged(doc: _Document, top: Mapping[str, Any]) -> StagedModel:
    stages = tuple(
        tuple(doc.text(label, f"stages[{t}][{s}]") for s, label in enumerate(doc.sequence(labels, f"stages[{t}]")))
        for t, labels in enumerate(doc.sequence(doc.member(top, "stages", ""), "stages"))
    )
    if not stages:
        raise doc.fail("a staged model needs at least one stage", "stages")

    controls = []
    for t, raw_stage in enumerate(doc.sequence(doc.member(top, "controls", ""), "controls")):
        stage_field = f"controls[{t}]"
        by_state = doc.mapping(raw_stage, stage_field)
        labels = stages[t] if t < len(stages) else ()
        unknown = [label for label in by_state if label not in labels]
        if unknown:
            raise doc.fail(f"controls for states {unknown} that are not in stage {t}", stage_field)
        controls.append(
            tuple(
                tuple(
                    _parse_control(doc, raw, f"{stage_field}.{label}[{k}]")
                    for k, raw in enumerate(doc.sequence(by_state.get(label, []), f"{stage_field}.{label}"))
                )
                for label in labels
            )
        )

    final = stages[-1]
    terminal = doc.mapping(doc.member(top, "terminal_rewards", ""), "terminal_rewards")
    unknown = [label for label in terminal if label not in final]
    if unknown:
        raise doc.fail(f"terminal rewards for states {unknown} that are not in the final stage", "terminal_rewards")
    terminal_rewards = tuple(
        doc.number(doc.member(terminal, label, "terminal_rewards"), f"terminal_rewards.{label}") for label in final
    )

    initial = doc.mapping(doc.member(top, "initial", ""), "initial")
    unknown = [label for label in initial if label not in stages[0]]
    if unknown:
        raise doc.fail(f"initial probabilities for states {unknown} that are not in stage 0", "initial")
    initial_distribution = tuple(doc.probability(initial.get(label, 0), f"initial.{label}") for label in stages[0])

    allow = top.get("allow_substochastic", False)
    if not isinstance(allow, bool):
        raise doc.fail("expected true or false", "allow_substochastic")

    model = StagedModel(
        stages=stages,
        controls=tuple(controls),
        terminal_rewards=terminal_rewards,
        initial_distribution=initial_distribution,
        allow_substochastic=allow,
        annotation=doc.text(top.get("annotation", ""), "annotation"),
    )
    return validate_staged_model(model)


def _parse_control(doc: _Document, raw: Any, field: str) -> Control:
    entry = doc.mapping(raw, field)
    dist = doc.mapping(doc.member(entry, "dist", field), f"{field}.dist")
    return Control(
        label=doc.text(doc.member(entry, "label", field), f"{field}.label"),
        reward=doc.number(entry.get("reward", 0), f"{field}.reward"),
        distribution=tuple((target, doc.probability(p, f"{field}.dist.{target}")) for target, p in dist.items()),
    )


def to_document(model: Model) -> dict[str, Any]:
    """Convert a model to its problem document.

    Parsing the document gives back an equal model.

    Raises:
        TypeError: if `model` is not one of the three model kinds.
    """
    if isinstance(model, ControlledMarkovProblem):
        return {
            "kind": "mdp",
            "states": list(model.state_labels),
            "actions": [
                [{"label": action.label, "p": list(action.p), "r": list(action.r)} for action in state_actions]
                for state_actions in model.actions
            ],
            "annotation": model.annotation,
        }
    if isinstance(model, StagedModel):
        return {
            "kind": "staged",
            "stages": [list(labels) for labels in model.stages],
            "controls": [
                {
                    label: [
                        {"label": control.label, "reward": control.reward, "dist": dict(control.distribution)}
                        for control in controls
                    ]
                    for label, controls in zip(model.stages[t], stage_controls)
                }
                for t, stage_controls in enumerate(model.controls)
            ],
            "terminal_rewards": dict(zip(model.stages[-1], model.terminal_rewards)),
            "initial": dict(zip(model.stages[0], model.initial_distribution)),
            "allow_substochastic": model.allow_substochastic,
            "annotation": model.annotation,
        }
    if isinstance(model, (Decision, Chance, Terminal)):
        return {"kind": "tree", "root": _node_document(model)}
    error_msg = f"cannot serialise {type(model).__name__}"
    raise TypeError(error_msg)


def _node_document(node: TreeNode) -> dict[str, Any]:
    if isinstance(node, Terminal):
        return {"type": "terminal", "label": node.label, "payoff": node.payoff}
    if isinstance(node, Decision):
        return {
            "type": "decision",
            "label": node.label,
            "branches": [
                {"label": b.label, "adjustment": b.cash_adjustment, "node": _node_document(b.child)}
                for b in node.branches
            ],
        }
    return {
        "type": "chance",
        "label": node.label,
        "branches": [
            {"label": b.label, "probability": b.probability, "node": _node_document(b.child)} for b in node.branches
        ],
    }


def dump_problem(model: Model) -> str:
    """Serialise a model as an indented problem document."""
    document = to_document(model)
    if not _all_finite(document):
        error_msg = "model contains non-finite numbers"
        raise ValueError(error_msg)
    return json.dumps(document, indent=2) + "\n"


def _all_finite(value: Any) -> bool:
    if isinstance(value, float):
        return math.isfinite(value)
    if isinstance(value, dict):
        return all(_all_finite(v) for v in value.values())
    if isinstance(value, list):
        return all(_all_finite(v) for v in value)
    return True


def dataset_path(name: str) -> Traversable:
    """The location of a bundled dataset.

    Args:
        name: One of ``dealership.mdp``, ``product-launch.tree``,
            ``staged-example.staged``, or ``deterministic-example.staged``.

    Raises:
        KeyError: if there is no such dataset.
    """
    if name not in DATASETS:
        error_msg = f"no bundled dataset {name!r}; available: {', '.join(DATASETS)}"
        raise KeyError(error_msg)
    return resources.files("lifecyclelib") / "data" / name
