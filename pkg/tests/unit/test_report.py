#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""Tests for human-readable and machine-readable reports."""

from __future__ import annotations

import json

import pytest

from lifecyclelib import (
    ControlledMarkovProblem,
    LaunchParameters,
    PolicyVector,
    Settings,
    StagedModel,
    backward_induction,
    build_product_launch_tree,
    classify_growth,
    exhaustive_gain_max,
    policy_iteration,
    render_report,
    rollback,
    simulate,
    validate_staged_model,
)
from lifecyclelib.howard import IterationTrace

THREE_DECIMALS = Settings(precision=3)


@pytest.fixture(scope="module")
def dealership_trace(dealership: ControlledMarkovProblem) -> IterationTrace:
    return policy_iteration(dealership)


class TestPolicyIterationReport:
    def test_empty_trace(self) -> None:
        assert render_report(IterationTrace(()), settings=THREE_DECIMALS) == "Policy iteration\n"

    def test_summary(self, dealership: ControlledMarkovProblem, dealership_trace: IterationTrace) -> None:
        text = render_report(dealership_trace, settings=THREE_DECIMALS, source=dealership)
        assert text.startswith("Policy iteration\nIteration 1\n  policy:          1,1,1,1,1\n")
        assert "  gain:            150.779\n" in text
        assert "  improved policy: 5,4,5,4,4\n" in text
        assert "Final policy: 5,4,5,4,4 (converged after 2 iterations)" in text
        assert "  City 1: action 5 (search)" in text
        assert text.endswith("Gain: 411.952\n")

    def test_trace_marks_chosen_actions(self, dealership_trace: IterationTrace) -> None:
        text = render_report(dealership_trace, settings=THREE_DECIMALS, trace=True)
        first_iteration = text.split("Iteration 2")[0]
        marked = [line.split()[:2] for line in first_iteration.splitlines() if line.endswith("  +")]
        assert marked == [["1", "5"], ["2", "4"], ["3", "5"], ["4", "4"], ["5", "4"]]
        assert "  state  action  test value\n" in first_iteration

    def test_trace_is_optional(self, dealership_trace: IterationTrace) -> None:
        assert "+" not in render_report(dealership_trace, settings=THREE_DECIMALS)

    def test_precision(self, dealership_trace: IterationTrace) -> None:
        text = render_report(dealership_trace, settings=Settings(precision=1))
        assert "  gain:            150.8\n" in text
        assert "150.779" not in text

    def test_precision_from_environment(
        self, dealership_trace: IterationTrace, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv("LIFECYCLELIB_PRECISION", "5")
        assert "  gain:            150.77906\n" in render_report(dealership_trace)

    def test_machine_values_are_exact(self, dealership_trace: IterationTrace) -> None:
        document = json.loads(render_report(dealership_trace, "machine"))
        assert document["report"] == "policy-iteration"
        assert document["converged"] is True
        assert document["final_policy"] == [5, 4, 5, 4, 4]
        assert document["gain"] == dealership_trace.gain
        for entry, step in zip(document["iterations"], dealership_trace.steps):
            assert entry["gain"] == step.solution.gain
            assert entry["v"] == list(step.solution.v)
            assert entry["reference_state"] == 5
            assert entry["test_values"] == [list(values) for values in step.improvement.test_values]

    def test_machine_mode_ignores_precision(self, dealership_trace: IterationTrace) -> None:
        assert render_report(dealership_trace, "machine", settings=Settings(precision=0)) == render_report(
            dealership_trace, "machine", settings=Settings(precision=9)
        )


class TestOtherReports:
    def test_enumeration(self) -> None:
        problem = ControlledMarkovProblem.from_rows(
            [[("stay", [1.0, 0.0], [1.0, 0.0])], [("stay", [0.0, 1.0], [0.0, 2.0]), ("move", [1.0, 0.0], [0.0, 0.0])]]
        )
        text = render_report(exhaustive_gain_max(problem), settings=THREE_DECIMALS)
        assert "  policies evaluated:   2\n" in text
        assert "  skipped (multichain): 1\n" in text
        assert "  best policy:          1,2\n" in text
        assert "  best gain:            1.000\n" in text
        assert "  skipped: 1,1\n" in text

    def test_simulation(self, dealership: ControlledMarkovProblem) -> None:
        report = simulate(dealership, PolicyVector.from_external([5, 4, 5, 4, 4]), start_state=1, steps=100, seed=2)
        text = render_report(report, settings=THREE_DECIMALS)
        assert "  start state:     2\n" in text
        document = json.loads(render_report(report, "machine"))
        assert document["report"] == "simulation"
        assert document["start_state"] == 2
        assert document["empirical_gain"] == report.empirical_gain
        assert document["end_state"] == report.end_state + 1

    def test_tree(self) -> None:
        rolled = rollback(build_product_launch_tree(LaunchParameters.product_launch()))
        text = render_report(rolled, settings=THREE_DECIMALS)
        assert text.startswith("Decision tree\n  value: 80500.000\n")
        assert "* test-regionally (-4000.000): [chance regional test] value 84500.000, total 80500.000" in text
        assert "  root/test-regionally/negative: stop\n" in text
        document = json.loads(render_report(rolled, "machine"))
        assert document["value"] == rolled.value
        assert document["root"]["optimal_branch"] == 1
        assert document["strategy"]["root"] == "test-regionally"

    def test_stages(self, staged_example: StagedModel) -> None:
        model = validate_staged_model(staged_example)
        values = backward_induction(model)
        text = render_report(values, settings=THREE_DECIMALS, source=model)
        assert "  III: 2.750 (III.2)\n" in text
        assert "  T2: 2.000\n" in text
        assert "Initial value: 4.328\n" in text
        assert "Warning: stage 0, state I, control I.2" in text
        document = json.loads(render_report(values, "machine", source=model))
        assert document["initial_value"] == pytest.approx(2597 / 600, abs=1e-12)
        assert len(document["warnings"]) == 1

    def test_stages_need_the_model(self, staged_example: StagedModel) -> None:
        with pytest.raises(TypeError):
            render_report(backward_induction(staged_example), settings=THREE_DECIMALS)

    def test_growth(self) -> None:
        text = render_report(classify_growth(2.0, 5.0), settings=THREE_DECIMALS)
        assert "rate:         2.500\n" in text
        assert text.endswith("state:        Growth\n")
        assert json.loads(render_report(classify_growth(2.0, -1.0), "machine"))["state"] == "Decline"

    def test_unknown_mode(self) -> None:
        with pytest.raises(ValueError):
            render_report(classify_growth(1.0, 1.0), "xml")

    def test_unknown_result(self) -> None:
        with pytest.raises(TypeError):
            render_report("result", settings=THREE_DECIMALS)  # type: ignore[arg-type]
