#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Controlled Markov problems
--------------------------

A :class:`ControlledMarkovProblem` consists of a finite number of states,
and for every state a finite, non-empty list of actions.
Each action (:class:`ActionSpec`) carries a row of transition probabilities
and a row of rewards, one reward per transition.
A :class:`PolicyVector` picks one action per state.

Internally, states and actions are addressed with 0-based indices.
External formats (files, command line, reports) use 1-based indices.

.. autoclass:: ActionSpec
.. autoclass:: ControlledMarkovProblem
   :members: n_states, action_counts, policy_count, from_rows

.. autoclass:: PolicyVector
   :members: from_external, parse, to_external

.. autoclass:: GainBiasSolution

.. autofunction:: validate_problem
.. autofunction:: expected_immediate_reward
.. autofunction:: policy_matrices
.. autofunction:: check_policy
.. autofunction:: first_action_policy

Growth classification
---------------------

.. autoclass:: GrowthState
.. autoclass:: GrowthIndicators
.. autofunction:: classify_growth
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from lifecyclelib.config import ROW_SUM_TOLERANCE, STABLE_TOLERANCE
from lifecyclelib.errors import (
    EmptyActionSet,
    InvalidPolicy,
    NegativeProbability,
    NonFiniteValue,
    NonPositiveTime,
    RowSumError,
    ShapeMismatch,
    ValidationError,
)

#: A row of an action: (label, transition probabilities, rewards).
ActionRow = Tuple[str, Sequence[float], Sequence[float]]


@dataclass(frozen=True)
class ActionSpec:
    """One action available in a state.

    Attributes:
        label: Name of the action.
        p: Transition probabilities to every state.
        r: Reward (change in capitalization) for the transition to every state.
    """

    label: str
    p: tuple[float, ...]
    r: tuple[float, ...]


@dataclass(frozen=True)
class ControlledMarkovProblem:
    """A finite controlled Markov chain with transition rewards.

    Instances are not validated on construction; use :func:`validate_problem`
    or :meth:`from_rows` to obtain a problem that is known to be valid.

    Attributes:
        state_labels: One label per state.
        actions: For every state, the actions that are available in that state.
        annotation: Free-text note carried from the problem file.
    """

    state_labels: tuple[str, ...]
    actions: tuple[tuple[ActionSpec, ...], ...]
    annotation: str = ""

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[ActionRow]],
        state_labels: Sequence[str] | None = None,
        annotation: str = "",
    ) -> ControlledMarkovProblem:
        """Build and validate a problem from plain rows.

        Args:
            rows: For every state, a sequence of ``(label, p, r)`` tuples.
            state_labels: The state labels. Defaults to ``"1"``, ``"2"``, ...
            annotation: Free-text note, e.g. the provenance of corrected rows.

        Returns:
            The validated problem.

        Raises:
            ValidationError: if the rows do not form a valid problem.
        """
        labels = tuple(state_labels) if state_labels is not None else tuple(str(i + 1) for i in range(len(rows)))
        actions = tuple(
            tuple(ActionSpec(label, tuple(float(x) for x in p), tuple(float(x) for x in r)) for label, p, r in state)
            for state in rows
        )
        return validate_problem(cls(labels, actions, annotation))

    @property
    def n_states(self) -> int:
        """The number of states."""
        return len(self.state_labels)

    @property
    def action_counts(self) -> tuple[int, ...]:
        """The number of actions in every state."""
        return tuple(len(state_actions) for state_actions in self.actions)

    @property
    def policy_count(self) -> int:
        """The number of distinct policies, i.e. the product of the action counts."""
        return math.prod(self.action_counts)

    @cached_property
    def transition_arrays(self) -> tuple[npt.NDArray[np.float64], ...]:
        """Per state, a ``k_i × N`` array with the transition rows of its actions."""
        return tuple(np.array([action.p for action in state], dtype=np.float64) for state in self.actions)

    @cached_property
    def reward_arrays(self) -> tuple[npt.NDArray[np.float64], ...]:
        """Per state, a ``k_i × N`` array with the reward rows of its actions."""
        return tuple(np.array([action.r for action in state], dtype=np.float64) for state in self.actions)

    @cached_property
    def expected_rewards(self) -> tuple[npt.NDArray[np.float64], ...]:
        """Per state, the expected immediate reward of every action."""
        return tuple(
            np.array([np.dot(p, r) for p, r in zip(ps, rs)], dtype=np.float64)
            for ps, rs in zip(self.transition_arrays, self.reward_arrays)
        )


@dataclass(frozen=True)
class PolicyVector:
    """A stationary policy: one (0-based) action index per state.

    Attributes:
        choice: The selected action index for every state.
    """

    choice: tuple[int, ...]

    @classmethod
    def from_external(cls, actions: Iterable[int]) -> PolicyVector:
        """Create a policy from 1-based action numbers."""
        return cls(tuple(int(action) - 1 for action in actions))

    @classmethod
    def parse(cls, text: str) -> PolicyVector:
        """Create a policy from a comma-separated list of 1-based action numbers, e.g. ``"5,4,5,4,4"``.

        Raises:
            InvalidPolicy: if the text is not a comma-separated list of integers.
        """
        try:
            return cls.from_external(int(item) for item in text.split(","))
        except ValueError:
            error_msg = f"Invalid policy {text!r}: expected comma-separated action numbers"
            raise InvalidPolicy(error_msg) from None

    def to_external(self) -> tuple[int, ...]:
        """The 1-based action numbers."""
        return tuple(action + 1 for action in self.choice)

    def __len__(self) -> int:
        return len(self.choice)

    def __str__(self) -> str:
        return ",".join(str(action) for action in self.to_external())


@dataclass(frozen=True)
class GainBiasSolution:
    """Solution of the value-determination equations of a policy.

    Attributes:
        gain: Long-run average reward per transition.
        v: Relative value of every state.
        reference_state: (0-based) state whose relative value is pinned to zero.
    """

    gain: float
    v: tuple[float, ...]
    reference_state: int


class GrowthState(enum.Enum):
    """Classification of a company by the sign of its growth rate."""

    GROWTH = "Growth"
    STABLE = "Stable"
    DECLINE = "Decline"


@dataclass(frozen=True)
class GrowthIndicators:
    """Growth rate and growth acceleration of a stock-price growth value.

    Attributes:
        t: The time.
        x: The stock-price growth value at time `t`.
        rate: Growth rate ``x / t``.
        acceleration: Growth acceleration ``rate / t``.
        state: Classification derived from the growth rate.
    """

    t: float
    x: float
    rate: float
    acceleration: float
    state: GrowthState


def validate_problem(raw: ControlledMarkovProblem, *, tolerance: float = ROW_SUM_TOLERANCE) -> ControlledMarkovProblem:
    """Check all invariants of a candidate problem.

    Every violation is collected, with its 1-based (state, action) coordinates,
    before an exception is raised.

    Args:
        raw: The candidate problem.
        tolerance: Allowed deviation of a probability row sum from one.

    Returns:
        The problem itself, if it is valid.

    Raises:
        RowSumError: if a transition row does not sum to one.
        NegativeProbability: if a transition probability is outside [0, 1].
        ShapeMismatch: if a row has the wrong length, or the number of action lists
            differs from the number of states.
        EmptyActionSet: if there are no states, or a state has no actions.
        NonFiniteValue: if a probability or reward is not finite.
        ValidationError: if more than one violation was found.
    """
    violations: list[ValidationError] = []
    n = len(raw.state_labels)
    if n == 0:
        violations.append(EmptyActionSet("problem has no states"))
    if len(raw.actions) != n:
        violations.append(ShapeMismatch(f"{len(raw.actions)} action lists for {n} states"))

    for i, state_actions in enumerate(raw.actions, start=1):
        if not state_actions:
            violations.append(EmptyActionSet("state has no actions", state=i))
        for k, action in enumerate(state_actions, start=1):
            violations.extend(_row_violations(action, n, i, k, tolerance))

    ValidationError.collect(violations)
    return raw


def _row_violations(action: ActionSpec, n: int, state: int, action_no: int, tolerance: float) -> list[ValidationError]:
    violations: list[ValidationError] = []
    coordinates = {"state": state, "action": action_no}
    for name, row in (("p", action.p), ("r", action.r)):
        if len(row) != n:
            violations.append(ShapeMismatch(f"{name} row has length {len(row)}, expected {n}", **coordinates))
        if not all(math.isfinite(x) for x in row):
            violations.append(NonFiniteValue(f"{name} row contains a non-finite value", **coordinates))
    if violations:
        return violations

    out_of_range = [j for j, x in enumerate(action.p, start=1) if not 0.0 <= x <= 1.0]
    if out_of_range:
        columns = ", ".join(str(j) for j in out_of_range)
        violations.append(NegativeProbability(f"probability outside [0, 1] at j = {columns}", **coordinates))
    total = math.fsum(action.p)
    if abs(total - 1.0) > tolerance:
        violations.append(RowSumError(f"probabilities sum to {total!r}, not 1", **coordinates))
    return violations


def expected_immediate_reward(problem: ControlledMarkovProblem, state: int, action: int) -> float:
    """The expected one-step reward ``q`` of an action: the dot product of its p row and r row.

    Args:
        problem: A valid problem.
        state: 0-based state index.
        action: 0-based action index within the state.

    Returns:
        The expected immediate reward.

    Raises:
        IndexError: if the state or action does not exist.
    """
    if not 0 <= state < problem.n_states:
        error_msg = f"state index {state} out of range for {problem.n_states} states"
        raise IndexError(error_msg)
    if not 0 <= action < len(problem.actions[state]):
        error_msg = f"action index {action} out of range for state {state} with {len(problem.actions[state])} actions"
        raise IndexError(error_msg)
    return float(problem.expected_rewards[state][action])


def check_policy(problem: ControlledMarkovProblem, policy: PolicyVector) -> None:
    """Verify that a policy selects an existing action in every state.

    Raises:
        InvalidPolicy: on a length mismatch or an out-of-range action.
    """
    if len(policy) != problem.n_states:
        error_msg = f"policy {policy} has {len(policy)} entries, problem has {problem.n_states} states"
        raise InvalidPolicy(error_msg)
    for i, (action, count) in enumerate(zip(policy.choice, problem.action_counts), start=1):
        if not 0 <= action < count:
            error_msg = f"policy {policy} selects action {action + 1} in state {i}, which has {count} actions"
            raise InvalidPolicy(error_msg)


def first_action_policy(problem: ControlledMarkovProblem) -> PolicyVector:
    """The policy that selects the first action in every state."""
    return PolicyVector((0,) * problem.n_states)


def policy_matrices(
    problem: ControlledMarkovProblem, policy: PolicyVector
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """The transition matrix and expected-reward vector of a fixed policy.

    Args:
        problem: A valid problem.
        policy: A policy for the problem.

    Returns:
        A tuple ``(P, q)``. Row ``i`` of ``P`` is the p row of the action chosen in state ``i``,
        and ``q[i]`` is that action's expected immediate reward.

    Raises:
        InvalidPolicy: if the policy does not fit the problem.
    """
    check_policy(problem, policy)
    transitions = np.array([problem.transition_arrays[i][k] for i, k in enumerate(policy.choice)], dtype=np.float64)
    q = np.array([problem.expected_rewards[i][k] for i, k in enumerate(policy.choice)], dtype=np.float64)
    return transitions, q


def classify_growth(t: float, x: float, epsilon: float = STABLE_TOLERANCE) -> GrowthIndicators:
    """Compute the growth rate and acceleration of a growth value, and classify it.

    The growth rate is the ratio ``x / t``, and the acceleration is ``rate / t``.
    A company is growing if the rate exceeds `epsilon`, declining if it is below ``-epsilon``,
    and stable otherwise.

    Args:
        t: The time; must be positive.
        x: The growth value at time `t`.
        epsilon: Tolerance around zero for the stable state.

    Returns:
        The growth indicators.

    Raises:
        NonPositiveTime: if `t` is not positive.
    """
    if not t > 0:
        error_msg = f"growth indicators require t > 0, got t = {t!r}"
        raise NonPositiveTime(error_msg)
    rate = x / t
    acceleration = rate / t
    if rate > epsilon:
        state = GrowthState.GROWTH
    elif rate < -epsilon:
        state = GrowthState.DECLINE
    else:
        state = GrowthState.STABLE
    return GrowthIndicators(t=t, x=x, rate=rate, acceleration=acceleration, state=state)
