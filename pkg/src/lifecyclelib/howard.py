#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Policy iteration
----------------

Howard's policy-iteration algorithm for the long-run average reward of a
:class:`~lifecyclelib.model.ControlledMarkovProblem`.
Each iteration consists of two steps:

1. *Value determination*: for the current policy, solve

   .. math:: g + v_i = q_i + \\sum_j p_{ij} v_j, \\qquad i = 1, \\ldots, N

   with the relative value of a reference state fixed at zero.

2. *Policy improvement*: for every state ``i`` and action ``k``, compute the test value

   .. math:: T_i^k = q_i^k + \\sum_j p_{ij}^k v_j

   and select the action with the largest test value.
   The current action is kept when it is (within tolerance) one of the best.

The iteration stops when the improved policy equals the current policy.
The method assumes that every policy visited is unichain.
A singular value-determination system is reported as
:exc:`~lifecyclelib.errors.MultichainSuspected`.

.. autoclass:: ImprovementTable
   :members: marked

.. autoclass:: IterationStep
.. autoclass:: IterationTrace
   :members: final_policy, gain, gains, converged

.. autofunction:: value_determination
.. autofunction:: value_residual
.. autofunction:: improve_policy
.. autofunction:: policy_iteration
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from lifecyclelib.config import DEFAULT_MAX_ITERATIONS, TIE_TOLERANCE
from lifecyclelib.errors import MaxIterationsExceeded, MultichainSuspected, ShapeMismatch, SingularMatrix
from lifecyclelib.linalg import DenseSystem, solve_dense
from lifecyclelib.model import (
    ControlledMarkovProblem,
    GainBiasSolution,
    PolicyVector,
    check_policy,
    first_action_policy,
    policy_matrices,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ImprovementTable:
    """Result of a policy-improvement step.

    Attributes:
        test_values: Per state, the test value of every action.
        chosen: The improved policy.
    """

    test_values: tuple[tuple[float, ...], ...]
    chosen: PolicyVector

    def marked(self) -> list[tuple[int, int, float, bool]]:
        """The table as ``(state, action, test value, chosen)`` rows, with 1-based indices."""
        return [
            (i + 1, k + 1, value, k == self.chosen.choice[i])
            for i, values in enumerate(self.test_values)
            for k, value in enumerate(values)
        ]


@dataclass(frozen=True)
class IterationStep:
    """One policy-iteration step: a policy, its gain and relative values, and the improvement table."""

    policy: PolicyVector
    solution: GainBiasSolution
    improvement: ImprovementTable
    q: tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class IterationTrace:
    """The complete history of a policy-iteration run."""

    steps: tuple[IterationStep, ...]

    @property
    def final_policy(self) -> PolicyVector | None:
        """The policy the iteration ended with, or `None` for an empty trace."""
        return self.steps[-1].improvement.chosen if self.steps else None

    @property
    def gain(self) -> float | None:
        """The gain of the final policy, or `None` for an empty trace."""
        return self.steps[-1].solution.gain if self.steps else None

    @property
    def gains(self) -> tuple[float, ...]:
        """The gain of every iteration."""
        return tuple(step.solution.gain for step in self.steps)

    @property
    def converged(self) -> bool:
        """Indicates if the last improvement step reproduced its incumbent policy."""
        return bool(self.steps) and self.steps[-1].improvement.chosen == self.steps[-1].policy


def _default_reference(problem: ControlledMarkovProblem, reference_state: int | None) -> int:
    reference = problem.n_states - 1 if reference_state is None else reference_state
    if not 0 <= reference < problem.n_states:
        error_msg = f"reference state {reference} out of range for {problem.n_states} states"
        raise IndexError(error_msg)
    return reference


def _policy_q(
    problem: ControlledMarkovProblem, policy: PolicyVector, q: Sequence[float] | None
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    transitions, derived_q = policy_matrices(problem, policy)
    if q is None:
        return transitions, derived_q
    injected = np.array(q, dtype=np.float64)
    if injected.shape != derived_q.shape:
        error_msg = f"injected q has length {len(injected)}, problem has {problem.n_states} states"
        raise ShapeMismatch(error_msg)
    return transitions, injected


def value_determination(
    problem: ControlledMarkovProblem,
    policy: PolicyVector,
    reference_state: int | None = None,
    *,
    q: Sequence[float] | None = None,
) -> GainBiasSolution:
    """Solve the gain and relative values of a fixed policy.

    The unknowns are the gain ``g`` and the relative values of all states except
    the reference state, whose value is zero.

    Args:
        problem: A valid problem.
        policy: The policy to evaluate.
        reference_state: 0-based state whose relative value is fixed at zero. Defaults to the last state.
        q: Expected immediate rewards to use instead of the ones derived from the problem's reward rows.

    Returns:
        The gain and relative values.

    Raises:
        MultichainSuspected: if the system is singular.
        InvalidPolicy: if the policy does not fit the problem.
    """
    reference = _default_reference(problem, reference_state)
    transitions, rewards = _policy_q(problem, policy, q)
    n = problem.n_states
    free = [j for j in range(n) if j != reference]

    # Column 0 holds g, the remaining columns the free relative values.
    a = np.empty((n, n), dtype=np.float64)
    a[:, 0] = 1.0
    identity = np.eye(n)
    for column, j in enumerate(free, start=1):
        a[:, column] = identity[:, j] - transitions[:, j]

    try:
        x = solve_dense(DenseSystem(a, rewards))
    except SingularMatrix as exc:
        error_msg = f"value determination for policy {policy} is singular; the policy is probably multichain"
        raise MultichainSuspected(error_msg) from exc

    v = [0.0] * n
    for column, j in enumerate(free, start=1):
        v[j] = float(x[column])
    return GainBiasSolution(gain=float(x[0]), v=tuple(v), reference_state=reference)


def value_residual(
    problem: ControlledMarkovProblem,
    policy: PolicyVector,
    solution: GainBiasSolution,
    *,
    q: Sequence[float] | None = None,
) -> float:
    """The largest absolute residual of the N value-determination equations for a solution."""
    transitions, rewards = _policy_q(problem, policy, q)
    v = np.array(solution.v, dtype=np.float64)
    differences = solution.gain + v - rewards - transitions @ v
    return float(np.max(np.abs(differences)))


def improve_policy(
    problem: ControlledMarkovProblem,
    v: Sequence[float],
    incumbent: PolicyVector,
    *,
    tolerance: float = TIE_TOLERANCE,
) -> ImprovementTable:
    """Compute the test value of every action and select the best action per state.

    In every state the incumbent action is kept if its test value is within `tolerance`
    of the maximum. Otherwise the lowest-numbered action within `tolerance` of the maximum is chosen.

    Args:
        problem: A valid problem.
        v: Relative values of the states.
        incumbent: The current policy.
        tolerance: Tie tolerance for test values.

    Returns:
        The improvement table.

    Raises:
        ShapeMismatch: if `v` does not have one value per state.
    """
    if len(v) != problem.n_states:
        error_msg = f"relative values have length {len(v)}, problem has {problem.n_states} states"
        raise ShapeMismatch(error_msg)
    check_policy(problem, incumbent)
    values = np.array(v, dtype=np.float64)

    table: list[tuple[float, ...]] = []
    chosen: list[int] = []
    for i in range(problem.n_states):
        test = problem.expected_rewards[i] + problem.transition_arrays[i] @ values
        best = float(np.max(test))
        current = incumbent.choice[i]
        if test[current] >= best - tolerance:
            chosen.append(current)
        else:
            chosen.append(int(np.flatnonzero(test >= best - tolerance)[0]))
        table.append(tuple(float(t) for t in test))
    return ImprovementTable(test_values=tuple(table), chosen=PolicyVector(tuple(chosen)))


def policy_iteration(
    problem: ControlledMarkovProblem,
    initial_policy: PolicyVector | None = None,
    reference_state: int | None = None,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> IterationTrace:
    """Run policy iteration until the policy no longer changes.

    Args:
        problem: A valid problem.
        initial_policy: Starting policy. Defaults to the first action in every state.
        reference_state: 0-based reference state for value determination. Defaults to the last state.
        max_iterations: Maximum number of value-determination steps.

    Returns:
        The full iteration trace. Its last step's improved policy equals that step's policy.

    Raises:
        MaxIterationsExceeded: if the policy still changes after `max_iterations` steps.
        MultichainSuspected: if a visited policy has a singular value-determination system.
        InvalidPolicy: if the initial policy does not fit the problem.
        ValueError: if `max_iterations` is less than one.
    """
    if max_iterations < 1:
        error_msg = f"max_iterations must be at least 1, got {max_iterations}"
        raise ValueError(error_msg)
    policy = first_action_policy(problem) if initial_policy is None else initial_policy
    check_policy(problem, policy)

    steps: list[IterationStep] = []
    for iteration in range(1, max_iterations + 1):
        solution = value_determination(problem, policy, reference_state)
        improvement = improve_policy(problem, solution.v, policy)
        _, q = policy_matrices(problem, policy)
        steps.append(
            IterationStep(
                policy=policy,
                solution=solution,
                improvement=improvement,
                q=tuple(float(x) for x in q),
                residual=value_residual(problem, policy, solution),
            )
        )
        logger.debug("Iteration %d: policy %s, gain %r", iteration, policy, solution.gain)
        if improvement.chosen == policy:
            logger.info("Converged after %d iterations: policy %s, gain %r", iteration, policy, solution.gain)
            return IterationTrace(tuple(steps))
        policy = improvement.chosen

    error_msg = f"policy iteration did not converge within {max_iterations} iterations"
    raise MaxIterationsExceeded(error_msg)
