#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Independent checks
------------------

The functions in this module compute the same quantities as the solvers,
by methods that share no code with them:

* :func:`exhaustive_gain_max` evaluates every policy of a controlled Markov problem
  through the stationary distribution of its chain (``g = π · q``),
  instead of through the gain/bias equations used by policy iteration.
* :func:`simulate` estimates the gain of a policy by running the chain.
* :func:`exhaustive_strategy_max` evaluates every pure strategy of a decision tree forwards.
* :func:`forward_enumeration_max` evaluates every control assignment of a staged model forwards,
  and :func:`longest_path_values` treats a deterministic staged model as a weighted DAG.

.. autoclass:: EnumerationResult
.. autoclass:: SimulationReport
.. autoclass:: StrategyResult

.. autofunction:: stationary_distribution
.. autofunction:: exhaustive_gain_max
.. autofunction:: simulate
.. autofunction:: exhaustive_strategy_max
.. autofunction:: forward_enumeration_max
.. autofunction:: longest_path_values
"""

from __future__ import annotations

import itertools
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Dict

import numpy as np
import numpy.typing as npt

from lifecyclelib.config import (
    MAX_DECISION_NODES,
    MAX_ENUMERATED_POLICIES,
    MAX_STAGED_CONTROLS,
    NEGATIVE_TOLERANCE,
    PER_POLICY_LIMIT,
)
from lifecyclelib.errors import NonUniqueStationary, ShapeMismatch, SingularMatrix, TooManyPolicies
from lifecyclelib.linalg import DenseSystem, solve_dense
from lifecyclelib.model import ControlledMarkovProblem, PolicyVector, check_policy, policy_matrices
from lifecyclelib.stages import StagedModel, StateKey
from lifecyclelib.tree import Chance, Decision, Terminal, TreeNode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnumerationResult:
    """Result of exhaustive policy enumeration.

    Attributes:
        best_policy: A policy with the largest gain; the lexicographically smallest one on ties.
            `None` if every policy was skipped.
        best_gain: The largest gain, or `None` if every policy was skipped.
        evaluated: The number of policies enumerated.
        per_policy: Every ``(policy, gain)`` pair, for small problems; `None` otherwise.
        skipped: Policies without a unique stationary distribution (multichain).
    """

    best_policy: PolicyVector | None
    best_gain: float | None
    evaluated: int
    per_policy: tuple[tuple[PolicyVector, float], ...] | None
    skipped: tuple[PolicyVector, ...]


@dataclass(frozen=True)
class SimulationReport:
    """Result of a simulation run.

    Attributes:
        seed: Seed of the random generator.
        steps: Number of simulated transitions.
        start_state: 0-based initial state.
        empirical_gain: Total reward divided by the number of steps.
        state_visit_frequencies: Fraction of steps that started in each state.
        total_reward: Sum of the rewards of all transitions.
        transition_counts: Number of transitions between every pair of states.
        end_state: 0-based state after the last transition.
    """

    seed: int
    steps: int
    start_state: int
    empirical_gain: float
    state_visit_frequencies: tuple[float, ...]
    total_reward: float
    transition_counts: tuple[tuple[int, ...], ...]
    end_state: int


@dataclass(frozen=True)
class StrategyResult:
    """Result of exhaustive strategy enumeration on a decision tree.

    Attributes:
        best_value: The largest expected payoff over all pure strategies.
        best_choices: Branch index per decision node (pre-order) of a best strategy.
        strategies: The number of strategies evaluated.
    """

    best_value: float
    best_choices: tuple[int, ...]
    strategies: int


def stationary_distribution(transitions: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """The stationary distribution ``π`` of a row-stochastic matrix.

    One of the balance equations ``π (P − I) = 0`` is replaced by the normalization
    ``sum π = 1``, and the resulting system is solved directly.

    Args:
        transitions: A square row-stochastic matrix.

    Returns:
        The stationary distribution.

    Raises:
        NonUniqueStationary: if the system is singular (more than one recurrent class),
            or the solution has a negative component.
        ShapeMismatch: if the matrix is not square.
    """
    matrix = np.asarray(transitions, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        error_msg = f"transition matrix must be square and non-empty, got shape {matrix.shape}"
        raise ShapeMismatch(error_msg)
    n = matrix.shape[0]
    a = matrix.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = solve_dense(DenseSystem(a, b))
    except SingularMatrix as exc:
        error_msg = "stationary distribution is not unique"
        raise NonUniqueStationary(error_msg) from exc
    if np.any(pi < -NEGATIVE_TOLERANCE):
        error_msg = f"stationary solution has negative components: {pi.tolist()}"
        raise NonUniqueStationary(error_msg)
    return np.clip(pi, 0.0, None)


def exhaustive_gain_max(
    problem: ControlledMarkovProblem,
    *,
    max_policies: int = MAX_ENUMERATED_POLICIES,
    per_policy_limit: int = PER_POLICY_LIMIT,
) -> EnumerationResult:
    """Evaluate the gain ``π · q`` of every policy and return the best one.

    Policies are enumerated in lexicographic order of their action indices.
    Policies whose chain has no unique stationary distribution are reported in
    :attr:`EnumerationResult.skipped`.

    Args:
        problem: A valid problem.
        max_policies: Refuse problems with more policies than this.
        per_policy_limit: Keep all ``(policy, gain)`` pairs if there are at most this many policies.

    Returns:
        The enumeration result.

    Raises:
        TooManyPolicies: if the policy space exceeds `max_policies`.
    """
    count = problem.policy_count
    if count > max_policies:
        error_msg = f"problem has {count} policies; at most {max_policies} can be enumerated"
        raise TooManyPolicies(error_msg)

    keep = count <= per_policy_limit
    per_policy: list[tuple[PolicyVector, float]] = []
    skipped: list[PolicyVector] = []
    best_policy: PolicyVector | None = None
    best_gain: float | None = None
    for choice in itertools.product(*(range(k) for k in problem.action_counts)):
        policy = PolicyVector(choice)
        transitions, q = policy_matrices(problem, policy)
        try:
            pi = stationary_distribution(transitions)
        except NonUniqueStationary:
            skipped.append(policy)
            continue
        gain = float(pi @ q)
        if keep:
            per_policy.append((policy, gain))
        if best_gain is None or gain > best_gain:
            best_policy, best_gain = policy, gain

    logger.info("Enumerated %d policies (%d skipped): best %s, gain %r", count, len(skipped), best_policy, best_gain)
    return EnumerationResult(
        best_policy=best_policy,
        best_gain=best_gain,
        evaluated=count,
        per_policy=tuple(per_policy) if keep else None,
        skipped=tuple(skipped),
    )


def simulate(
    problem: ControlledMarkovProblem,
    policy: PolicyVector,
    start_state: int = 0,
    steps: int = 100_000,
    seed: int = 0,
) -> SimulationReport:
    """Simulate the Markov chain of a policy and measure its average reward.

    All uniform variates are drawn up front from :func:`numpy.random.default_rng` with the given seed,
    one per step. In state ``i`` the next state is the first ``j`` for which
    the variate is strictly less than the cumulative probability ``p_i1 + ... + p_ij``
    of the chosen action's row. Identical inputs give identical reports.

    Args:
        problem: A valid problem.
        policy: The policy to simulate.
        start_state: 0-based initial state.
        steps: Number of transitions; at least one.
        seed: Seed of the random generator.

    Returns:
        The simulation report.

    Raises:
        ValueError: if `steps` is less than one.
        IndexError: if the start state does not exist.
        InvalidPolicy: if the policy does not fit the problem.
    """
    check_policy(problem, policy)
    if steps < 1:
        error_msg = f"steps must be at least 1, got {steps}"
        raise ValueError(error_msg)
    n = problem.n_states
    if not 0 <= start_state < n:
        error_msg = f"start state {start_state} out of range for {n} states"
        raise IndexError(error_msg)

    actions = [problem.actions[i][k] for i, k in enumerate(policy.choice)]
    cumulative = [list(itertools.accumulate(action.p)) for action in actions]
    last_reachable = [max(j for j, p in enumerate(action.p) if p > 0.0) for action in actions]
    counts = [[0] * n for _ in range(n)]

    uniforms = np.random.default_rng(seed).random(steps).tolist()
    state = start_state
    for u in uniforms:
        target = bisect_right(cumulative[state], u)
        if target > last_reachable[state]:
            target = last_reachable[state]
        counts[state][target] += 1
        state = target

    total = math.fsum(counts[i][j] * actions[i].r[j] for i in range(n) for j in range(n) if counts[i][j])
    logger.debug("Simulated %d steps of policy %s with seed %d: total reward %r", steps, policy, seed, total)
    return SimulationReport(
        seed=seed,
        steps=steps,
        start_state=start_state,
        empirical_gain=total / steps,
        state_visit_frequencies=tuple(sum(row) / steps for row in counts),
        total_reward=total,
        transition_counts=tuple(tuple(row) for row in counts),
        end_state=state,
    )


def _decision_nodes(node: TreeNode, found: dict[int, Decision]) -> None:
    if isinstance(node, Terminal):
        return
    if isinstance(node, Decision):
        if id(node) in found:
            return
        found[id(node)] = node
        for branch in node.branches:
            _decision_nodes(branch.child, found)
    else:
        for chance_branch in node.branches:
            _decision_nodes(chance_branch.child, found)


def _forward_payoff(node: TreeNode, choices: Dict[int, int]) -> float:
    if isinstance(node, Terminal):
        return node.payoff
    if isinstance(node, Chance):
        return sum(branch.probability * _forward_payoff(branch.child, choices) for branch in node.branches)
    branch = node.branches[choices[id(node)]]
    return branch.cash_adjustment + _forward_payoff(branch.child, choices)


def exhaustive_strategy_max(tree: TreeNode, *, max_decision_nodes: int = MAX_DECISION_NODES) -> StrategyResult:
    """Evaluate every pure strategy of a decision tree and return the best expected payoff.

    A pure strategy fixes one branch at every decision node.

    Args:
        tree: A valid decision tree.
        max_decision_nodes: Refuse trees with more decision nodes than this.

    Returns:
        The best strategy and its value; the first one in enumeration order on ties.

    Raises:
        TooManyPolicies: if the tree has too many decision nodes.
    """
    found: dict[int, Decision] = {}
    _decision_nodes(tree, found)
    if len(found) > max_decision_nodes:
        error_msg = f"tree has {len(found)} decision nodes; at most {max_decision_nodes} can be enumerated"
        raise TooManyPolicies(error_msg)

    keys = list(found)
    best_value = -math.inf
    best_choices: tuple[int, ...] = ()
    strategies = 0
    for choices in itertools.product(*(range(len(found[key].branches)) for key in keys)):
        strategies += 1
        value = _forward_payoff(tree, dict(zip(keys, choices)))
        if value > best_value:
            best_value, best_choices = value, choices
    return StrategyResult(best_value=best_value, best_choices=best_choices, strategies=strategies)


def _forward_value(model: StagedModel, key: StateKey, assignment: Dict[StateKey, int]) -> float:
    stage, label = key
    if stage == model.horizon:
        return model.terminal_rewards[model.state_index(stage, label)]
    control = model.controls[stage][model.state_index(stage, label)][assignment[key]]
    expected = sum(p * _forward_value(model, (stage + 1, target), assignment) for target, p in control.distribution)
    return control.reward + expected


def forward_enumeration_max(
    model: StagedModel, *, max_controls: int = MAX_STAGED_CONTROLS
) -> dict[StateKey, float]:
    """The best expected total reward from every state, over all control assignments.

    Every assignment of one control to each non-final state is evaluated by following
    the model forwards from each state; the maximum per state is returned.

    Args:
        model: A valid staged model.
        max_controls: Refuse models with more controls than this.

    Returns:
        The maximum expected total reward per state, including final states.

    Raises:
        TooManyPolicies: if the model has too many controls.
    """
    keys = [(stage, label) for stage in range(model.horizon) for label in model.stages[stage]]
    sizes = [len(model.controls[stage][model.state_index(stage, label)]) for stage, label in keys]
    if sum(sizes) > max_controls:
        error_msg = f"model has {sum(sizes)} controls; at most {max_controls} can be enumerated"
        raise TooManyPolicies(error_msg)

    best: dict[StateKey, float] = {
        (model.horizon, label): reward for label, reward in zip(model.stages[model.horizon], model.terminal_rewards)
    }
    for choices in itertools.product(*(range(size) for size in sizes)):
        assignment = dict(zip(keys, choices))
        for key in keys:
            value = _forward_value(model, key, assignment)
            if key not in best or value > best[key]:
                best[key] = value
    return best


def longest_path_values(model: StagedModel) -> dict[StateKey, float]:
    """Values of a deterministic staged model as longest paths in its weighted DAG.

    Every control is an edge from its state to its single next state, weighted with its reward;
    every final state adds its terminal reward. The value of a state is the weight of the
    heaviest path from it to a final state.

    Raises:
        ValueError: if a control does not lead to exactly one next state with probability one.
    """
    edges: dict[StateKey, list[tuple[StateKey, float]]] = {}
    for stage in range(model.horizon):
        for label, controls in zip(model.stages[stage], model.controls[stage]):
            targets = []
            for control in controls:
                support = [(target, p) for target, p in control.distribution if p > 0.0]
                if len(support) != 1 or support[0][1] != 1.0:
                    error_msg = f"control {control.label} in state {label} is not deterministic"
                    raise ValueError(error_msg)
                targets.append(((stage + 1, support[0][0]), control.reward))
            edges[(stage, label)] = targets

    longest: dict[StateKey, float] = {
        (model.horizon, label): reward for label, reward in zip(model.stages[model.horizon], model.terminal_rewards)
    }

    def visit(key: StateKey) -> float:
        if key not in longest:
            longest[key] = max(weight + visit(target) for target, weight in edges[key])
        return longest[key]

    for key in edges:
        visit(key)
    return longest


def sample_policies(problem: ControlledMarkovProblem, count: int, seed: int) -> list[PolicyVector]:
    """Draw `count` policies uniformly at random (with replacement)."""
    rng = np.random.default_rng(seed)
    return [
        PolicyVector(tuple(int(rng.integers(k)) for k in problem.action_counts)) for _ in range(count)
    ]
