#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""Compare the solvers with the independent checks on randomly generated models."""

from __future__ import annotations

import numpy as np
import pytest

from lifecyclelib import (
    Chance,
    ChanceBranch,
    ControlledMarkovProblem,
    Decision,
    DecisionBranch,
    StagedModel,
    Terminal,
    backward_induction,
    exhaustive_gain_max,
    improve_policy,
    policy_iteration,
    rollback,
    validate_staged_model,
    validate_tree,
    value_determination,
)
from lifecyclelib.stages import Control
from lifecyclelib.tree import TreeNode
from lifecyclelib.validation import exhaustive_strategy_max, forward_enumeration_max

SEEDS = range(25)


class _TreeBuilder:
    def __init__(self, rng: np.random.Generator, max_decisions: int):
        self.rng = rng
        self.decisions_left = max_decisions

    def build(self, depth: int) -> TreeNode:
        if depth == 0 or self.rng.random() < 0.25:
            return Terminal(float(self.rng.uniform(-100.0, 100.0)))
        if self.decisions_left > 0 and self.rng.random() < 0.5:
            self.decisions_left -= 1
            return Decision(
                tuple(
                    DecisionBranch(f"d{k}", float(self.rng.uniform(-20.0, 20.0)), self.build(depth - 1))
                    for k in range(2)
                )
            )
        probabilities = self.rng.dirichlet(np.ones(2))
        return Chance(
            tuple(ChanceBranch(float(p), self.build(depth - 1), label=f"c{k}") for k, p in enumerate(probabilities))
        )


def random_tree(seed: int) -> TreeNode:
    """A random tree with branching factor two and at most six decision nodes."""
    return _TreeBuilder(np.random.default_rng(seed), max_decisions=6).build(depth=5)


def random_staged_model(seed: int) -> StagedModel:
    """A random staged model: one initial state, one or two states per later stage, one or two controls per state."""
    rng = np.random.default_rng(seed)
    horizon = int(rng.integers(1, 3))
    stages = [("s0",)] + [tuple(f"s{t}.{i}" for i in range(int(rng.integers(1, 3)))) for t in range(1, horizon + 1)]
    controls = []
    for t in range(horizon):
        stage_controls = []
        for label in stages[t]:
            count = int(rng.integers(1, 3))
            stage_controls.append(
                tuple(
                    Control(
                        f"{label}/u{k}",
                        float(rng.uniform(-10.0, 10.0)),
                        tuple(zip(stages[t + 1], (float(p) for p in rng.dirichlet(np.ones(len(stages[t + 1])))))),
                    )
                    for k in range(count)
                )
            )
        controls.append(tuple(stage_controls))
    return StagedModel(
        stages=tuple(stages),
        controls=tuple(controls),
        terminal_rewards=tuple(float(r) for r in rng.uniform(-10.0, 10.0, size=len(stages[-1]))),
        initial_distribution=(1.0,),
    )


def random_problem(seed: int) -> ControlledMarkovProblem:
    """A random problem with two to four states and one to three actions per state, all transitions possible."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    return ControlledMarkovProblem.from_rows(
        [
            [
                (f"a{k}", rng.dirichlet(np.ones(n)).tolist(), rng.uniform(-100.0, 100.0, size=n).tolist())
                for k in range(int(rng.integers(1, 4)))
            ]
            for _ in range(n)
        ]
    )


class TestRandomTrees:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_rollback_equals_best_strategy(self, seed: int) -> None:
        tree = validate_tree(random_tree(seed))
        assert rollback(tree).value == pytest.approx(exhaustive_strategy_max(tree).best_value, abs=1e-9)


class TestRandomStagedModels:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_backward_induction_equals_forward_enumeration(self, seed: int) -> None:
        model = validate_staged_model(random_staged_model(seed))
        forward = forward_enumeration_max(model)
        for key, value in backward_induction(model).values.items():
            assert forward[key] == pytest.approx(value, abs=1e-12)


class TestRandomProblems:
    @pytest.mark.parametrize("seed", SEEDS)
    def test_policy_iteration_equals_enumeration(self, seed: int) -> None:
        problem = random_problem(seed)
        trace = policy_iteration(problem)
        enumeration = exhaustive_gain_max(problem)
        assert enumeration.skipped == ()
        assert trace.gain == pytest.approx(enumeration.best_gain, abs=1e-6)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gain_never_decreases(self, seed: int) -> None:
        gains = policy_iteration(random_problem(seed)).gains
        assert all(later >= earlier - 1e-9 for earlier, later in zip(gains, gains[1:]))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_no_policy_is_visited_twice(self, seed: int) -> None:
        policies = [step.policy for step in policy_iteration(random_problem(seed)).steps]
        assert len(set(policies)) == len(policies)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gain_does_not_depend_on_reference_state(self, seed: int) -> None:
        problem = random_problem(seed)
        policy = policy_iteration(problem).final_policy
        assert policy is not None
        gains = [value_determination(problem, policy, k).gain for k in range(problem.n_states)]
        assert gains == pytest.approx([gains[0]] * problem.n_states, abs=1e-9)

    @pytest.mark.parametrize("seed", SEEDS)
    def test_improvement_ignores_constant_shift(self, seed: int) -> None:
        problem = random_problem(seed)
        policy = policy_iteration(problem).steps[0].policy
        v = np.array(value_determination(problem, policy).v)
        assert improve_policy(problem, v + 37.5, policy).chosen == improve_policy(problem, v, policy).chosen

    @pytest.mark.parametrize("seed", SEEDS)
    def test_reward_shift(self, seed: int) -> None:
        problem = random_problem(seed)
        shifted = ControlledMarkovProblem.from_rows(
            [[(a.label, a.p, [r + 10.0 for r in a.r]) for a in state] for state in problem.actions]
        )
        original = policy_iteration(problem)
        result = policy_iteration(shifted)
        assert result.gain == pytest.approx(original.gain + 10.0, abs=1e-6)  # type: ignore[operator]
