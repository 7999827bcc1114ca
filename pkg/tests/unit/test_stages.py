#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""Tests for staged models and backward induction."""

from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import pytest

from lifecyclelib import StagedModel, ValidationError, backward_induction, evaluate_initial, validate_staged_model
from lifecyclelib.errors import (
    DuplicateLabel,
    EmptyActionSet,
    NonFiniteValue,
    RowSumError,
    ShapeMismatch,
    UnknownState,
)
from lifecyclelib.stages import Control, backward_step
from lifecyclelib.validation import longest_path_values


def deterministic_model() -> StagedModel:
    """A two-period expand-or-hold decision in which every control has a single successor."""

    def edge(label: str, reward: float, target: str) -> Control:
        return Control(label, reward, ((target, 1.0),))

    return StagedModel(
        stages=(("X0",), ("A", "B"), ("C", "D")),
        controls=(
            ((edge("expand", 3, "A"), edge("hold", 1, "B")),),
            (
                (edge("a-invest", -2, "C"), edge("a-harvest", 4, "D")),
                (edge("b-invest", 5, "C"), edge("b-harvest", 2, "D")),
            ),
        ),
        terminal_rewards=(6.0, 1.0),
        initial_distribution=(1.0,),
    )


class TestBackwardInduction:
    """The three-stage example."""

    @pytest.mark.parametrize(
        ("label", "value"), [("III", Fraction(11, 4)), ("IV", Fraction(19, 6)), ("V", Fraction(23, 5))]
    )
    def test_middle_stage_values(self, staged_example: StagedModel, label: str, value: Fraction) -> None:
        values = backward_induction(validate_staged_model(staged_example))
        assert values.value(1, label) == pytest.approx(float(value), abs=1e-12)

    @pytest.mark.parametrize(("label", "control"), [("III", "III.2"), ("IV", "IV.1"), ("V", "V.1"), ("I", "I.1")])
    def test_optimal_controls(self, staged_example: StagedModel, label: str, control: str) -> None:
        values = backward_induction(staged_example)
        stage = 0 if label == "I" else 1
        assert values.optimal_label(staged_example, stage, label) == control

    def test_first_stage_control_values(self, staged_example: StagedModel) -> None:
        values = backward_induction(staged_example)
        assert values.control_values[(0, "I")] == pytest.approx((2597 / 600, 151 / 60), abs=1e-12)
        assert values.value(0, "I") == pytest.approx(2597 / 600, abs=1e-12)

    def test_final_stage_values_are_terminal_rewards(self, staged_example: StagedModel) -> None:
        values = backward_induction(staged_example)
        assert values.value(2, "T1") == 1.0
        assert values.value(2, "T2") == 2.0
        assert (2, "T1") not in values.optimal_control

    def test_initial_value(self, staged_example: StagedModel) -> None:
        values = backward_induction(staged_example)
        assert evaluate_initial(staged_example, values) == pytest.approx(2597 / 600, abs=1e-12)

    def test_tie_goes_to_earliest_control(self) -> None:
        model = StagedModel(
            stages=(("s",), ("t",)),
            controls=(((Control("first", 1.0, (("t", 1.0),)), Control("second", 1.0, (("t", 1.0),))),),),
            terminal_rewards=(0.0,),
            initial_distribution=(1.0,),
        )
        assert backward_induction(model).optimal_label(model, 0, "s") == "first"

    @pytest.mark.parametrize("shift", [-10.0, 0.5, 4.0])
    def test_terminal_reward_shift(self, shift: float) -> None:
        """Adding a constant to every terminal reward adds it to every value and keeps every choice."""
        model = deterministic_model()
        shifted = replace(model, terminal_rewards=tuple(r + shift for r in model.terminal_rewards))
        values = backward_induction(model)
        shifted_values = backward_induction(shifted)
        assert shifted_values.optimal_control == values.optimal_control
        for key, value in values.values.items():
            assert shifted_values.values[key] == pytest.approx(value + shift, abs=1e-12)

    def test_terminal_reward_shift_with_missing_mass(self, staged_example: StagedModel) -> None:
        """A control whose probabilities sum to 5/8 picks up only 5/8 of the shift."""
        shifted = replace(staged_example, terminal_rewards=(5.0, 6.0))
        values = backward_induction(shifted)
        for label, value in (("III", Fraction(11, 4)), ("IV", Fraction(19, 6)), ("V", Fraction(23, 5))):
            assert values.value(1, label) == pytest.approx(float(value) + 4.0, abs=1e-12)
        assert values.control_values[(0, "I")] == pytest.approx((2597 / 600 + 4.0, 151 / 60 + 2.5), abs=1e-12)
        assert values.optimal_label(shifted, 0, "I") == "I.1"

    def test_step_from_serialized_values(self, staged_example: StagedModel) -> None:
        """A single stage can be recomputed from the next stage's values alone."""
        values = backward_induction(staged_example)
        stored = json.dumps({label: values.value(1, label) for label in staged_example.stages[1]})
        result = backward_step(staged_example, 0, json.loads(stored))
        assert result.values["I"] == values.value(0, "I")
        assert result.optimal_control["I"] == 0


class TestDeterministicModel:
    def test_values(self) -> None:
        model = validate_staged_model(deterministic_model())
        values = backward_induction(model)
        assert values.value(1, "A") == 5.0
        assert values.value(1, "B") == 11.0
        assert values.value(0, "X0") == 12.0
        assert values.optimal_label(model, 0, "X0") == "hold"
        assert values.optimal_label(model, 1, "A") == "a-harvest"

    def test_longest_paths(self) -> None:
        model = deterministic_model()
        assert longest_path_values(model) == backward_induction(model).values

    def test_longest_paths_need_deterministic_controls(self, staged_example: StagedModel) -> None:
        with pytest.raises(ValueError):
            longest_path_values(staged_example)


class TestValidateStagedModel:
    def test_substochastic_needs_permission(self, staged_example: StagedModel) -> None:
        with pytest.raises(RowSumError) as exc_info:
            validate_staged_model(replace(staged_example, allow_substochastic=False))
        assert "I.2" in exc_info.value.location

    def test_substochastic_warning(self, staged_example: StagedModel, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level("WARNING", logger="lifecyclelib.stages"):
            model = validate_staged_model(staged_example)
        assert len(model.warnings) == 1
        assert "control I.2" in model.warnings[0]
        assert len(caplog.records) == 1

    def test_oversized_distribution_is_an_error(self, staged_example: StagedModel) -> None:
        controls = list(staged_example.controls[1])
        controls[0] = (Control("III.1", 0, (("T1", 0.75), ("T2", 0.75))), controls[0][1])
        with pytest.raises(RowSumError):
            validate_staged_model(replace(staged_example, controls=(staged_example.controls[0], tuple(controls))))

    def test_duplicate_control_label(self) -> None:
        model = replace(
            deterministic_model(),
            controls=(
                deterministic_model().controls[0],
                (
                    (Control("invest", -2, (("C", 1.0),)),),
                    (Control("invest", 5, (("C", 1.0),)),),
                ),
            ),
        )
        with pytest.raises(DuplicateLabel):
            validate_staged_model(model)

    def test_duplicate_state_label(self) -> None:
        model = replace(deterministic_model(), stages=(("X0",), ("A", "A"), ("C", "D")))
        with pytest.raises(ValidationError) as exc_info:
            validate_staged_model(model)
        assert any(isinstance(v, DuplicateLabel) for v in exc_info.value.violations)

    def test_unknown_next_state(self) -> None:
        controls = (((Control("expand", 3, (("Z", 1.0),)),),), deterministic_model().controls[1])
        model = replace(deterministic_model(), controls=controls)
        with pytest.raises(UnknownState):
            validate_staged_model(model)

    def test_state_without_controls(self) -> None:
        model = replace(deterministic_model(), controls=(((),), deterministic_model().controls[1]))
        with pytest.raises(EmptyActionSet):
            validate_staged_model(model)

    def test_terminal_reward_count(self) -> None:
        with pytest.raises(ShapeMismatch):
            validate_staged_model(replace(deterministic_model(), terminal_rewards=(6.0,)))

    def test_non_finite_terminal_reward(self) -> None:
        with pytest.raises(NonFiniteValue):
            validate_staged_model(replace(deterministic_model(), terminal_rewards=(6.0, float("inf"))))

    def test_initial_distribution(self) -> None:
        with pytest.raises(RowSumError):
            validate_staged_model(replace(deterministic_model(), initial_distribution=(0.5,)))
