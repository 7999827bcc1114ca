#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Decision trees
--------------

A decision tree is built from three kinds of nodes:

* :class:`Decision` nodes, where the decision maker picks a branch.
  Each :class:`DecisionBranch` carries a signed cash adjustment
  (e.g. the cost of an investment) that is incurred when the branch is taken.
* :class:`Chance` nodes, where nature picks a branch with a given probability.
* :class:`Terminal` nodes with a final payoff.

:func:`rollback` evaluates a tree from the leaves upwards:
chance nodes take the expectation of their children,
decision nodes take the best branch value (cash adjustment plus child value).

Every node of the rolled-back tree also knows the cash that was committed on the path
from the root (:attr:`RolledBackTree.accrued`).
The sum of both, :attr:`RolledBackTree.expected_total`, is the expected total profit
of a strategy that arrives at that node and continues optimally.

.. autoclass:: Terminal
.. autoclass:: DecisionBranch
.. autoclass:: Decision
.. autoclass:: ChanceBranch
.. autoclass:: Chance
.. autodata:: TreeNode
.. autoclass:: RolledBackTree
   :members: expected_total, optimal_child

.. autofunction:: validate_tree
.. autofunction:: rollback
.. autofunction:: optimal_strategy

Product launch
--------------

.. autoclass:: LaunchParameters
   :members: product_launch

.. autofunction:: total_probability
.. autofunction:: build_product_launch_tree
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from lifecyclelib.config import ROW_SUM_TOLERANCE
from lifecyclelib.errors import (
    InvalidTree,
    NegativeProbability,
    NonFiniteValue,
    RowSumError,
    ShapeMismatch,
    ValidationError,
)

logger = logging.getLogger(__name__)

OUTCOMES = ("successful", "mediocre", "negative")


@dataclass(frozen=True)
class Terminal:
    """A leaf with a final payoff."""

    payoff: float
    label: str = ""


@dataclass(frozen=True)
class DecisionBranch:
    """A branch of a decision node.

    Attributes:
        label: Name of the alternative.
        cash_adjustment: Signed amount incurred when the branch is taken.
        child: The node the branch leads to.
    """

    label: str
    cash_adjustment: float
    child: TreeNode


@dataclass(frozen=True)
class Decision:
    """A node where the decision maker chooses one of the branches."""

    branches: tuple[DecisionBranch, ...]
    label: str = ""


@dataclass(frozen=True)
class ChanceBranch:
    """A branch of a chance node, taken with the given probability."""

    probability: float
    child: TreeNode
    label: str = ""


@dataclass(frozen=True)
class Chance:
    """A node where nature chooses one of the branches."""

    branches: tuple[ChanceBranch, ...]
    label: str = ""


#: Any tree node.
TreeNode = Union[Decision, Chance, Terminal]


@dataclass(frozen=True)
class RolledBackTree:
    """A tree node together with its rolled-back value.

    Attributes:
        node: The original node.
        value: Expected value of the subtree, under optimal decisions.
        accrued: Sum of the cash adjustments on the path from the root to this node.
        children: The rolled-back children, in branch order.
        optimal_branch: For decision nodes, the index of the best branch; `None` otherwise.
    """

    node: TreeNode
    value: float
    accrued: float
    children: tuple[RolledBackTree, ...]
    optimal_branch: int | None = None

    @property
    def expected_total(self) -> float:
        """Expected total profit when arriving at this node and continuing optimally."""
        return self.accrued + self.value

    def optimal_child(self) -> RolledBackTree:
        """The rolled-back child on the optimal branch of a decision node."""
        if self.optimal_branch is None:
            error_msg = "only decision nodes have an optimal branch"
            raise TypeError(error_msg)
        return self.children[self.optimal_branch]


def validate_tree(node: TreeNode, *, tolerance: float = ROW_SUM_TOLERANCE) -> TreeNode:
    """Check the invariants of a decision tree.

    Chance probabilities must lie in [0, 1] and sum to one, every decision and chance node
    must have at least one branch, all amounts must be finite, and the tree must be acyclic.

    Returns:
        The tree itself, if it is valid.

    Raises:
        ValidationError: describing every violation, with its path in the tree.
    """
    violations: list[ValidationError] = []
    _collect_tree_violations(node, "root", set(), violations, tolerance)
    ValidationError.collect(violations)
    return node


def _collect_tree_violations(
    node: TreeNode, path: str, ancestors: set[int], violations: list[ValidationError], tolerance: float
) -> None:
    if id(node) in ancestors:
        violations.append(InvalidTree("tree contains a cycle", location=path))
        return
    if isinstance(node, Terminal):
        if not math.isfinite(node.payoff):
            violations.append(NonFiniteValue("payoff is not finite", location=path))
        return

    if not node.branches:
        violations.append(InvalidTree(f"{type(node).__name__.lower()} node has no branches", location=path))
    ancestors.add(id(node))
    if isinstance(node, Decision):
        for number, branch in enumerate(node.branches, start=1):
            branch_path = f"{path}/{branch.label or number}"
            if not math.isfinite(branch.cash_adjustment):
                violations.append(NonFiniteValue("cash adjustment is not finite", location=branch_path))
            _collect_tree_violations(branch.child, branch_path, ancestors, violations, tolerance)
    else:
        probabilities = [branch.probability for branch in node.branches]
        if not all(0.0 <= p <= 1.0 for p in probabilities):
            violations.append(NegativeProbability("chance probability outside [0, 1]", location=path))
        elif node.branches and abs(math.fsum(probabilities) - 1.0) > tolerance:
            violations.append(RowSumError(f"chance probabilities sum to {math.fsum(probabilities)!r}", location=path))
        for number, branch in enumerate(node.branches, start=1):
            _collect_tree_violations(branch.child, f"{path}/{branch.label or number}", ancestors, violations, tolerance)
    ancestors.discard(id(node))


def rollback(tree: TreeNode, accrued: float = 0.0) -> RolledBackTree:
    """Evaluate a decision tree by expected-value rollback.

    Ties between decision branches are broken towards the earliest branch.

    Args:
        tree: A valid tree.
        accrued: Cash already committed before reaching `tree`.

    Returns:
        The rolled-back tree.
    """
    if isinstance(tree, Terminal):
        return RolledBackTree(node=tree, value=tree.payoff, accrued=accrued, children=())

    if isinstance(tree, Chance):
        chance_children = tuple(rollback(branch.child, accrued) for branch in tree.branches)
        value = sum(branch.probability * child.value for branch, child in zip(tree.branches, chance_children))
        return RolledBackTree(node=tree, value=value, accrued=accrued, children=chance_children)

    decision_children = tuple(rollback(branch.child, accrued + branch.cash_adjustment) for branch in tree.branches)
    best_index = 0
    best_value = -math.inf
    for index, (branch, child) in enumerate(zip(tree.branches, decision_children)):
        candidate = branch.cash_adjustment + child.value
        if candidate > best_value:
            best_index, best_value = index, candidate
    return RolledBackTree(
        node=tree, value=best_value, accrued=accrued, children=decision_children, optimal_branch=best_index
    )


def optimal_strategy(rolled: RolledBackTree, path: str = "root") -> dict[str, str]:
    """The optimal choice at every decision node that the optimal strategy can reach.

    Args:
        rolled: A rolled-back tree.
        path: Path name of `rolled`.

    Returns:
        A mapping from decision-node path to the label of the chosen branch.
        Paths are built from branch labels (or 1-based branch numbers for unlabelled branches).
    """
    strategy: dict[str, str] = {}
    node = rolled.node
    if isinstance(node, Decision) and rolled.optimal_branch is not None:
        branch = node.branches[rolled.optimal_branch]
        label = branch.label or str(rolled.optimal_branch + 1)
        strategy[path] = label
        strategy.update(optimal_strategy(rolled.optimal_child(), f"{path}/{label}"))
    elif isinstance(node, Chance):
        for number, (chance_branch, child) in enumerate(zip(node.branches, rolled.children), start=1):
            strategy.update(optimal_strategy(child, f"{path}/{chance_branch.label or number}"))
    return strategy


def _check_distribution(values: Sequence[float], what: str, tolerance: float) -> None:
    if not all(0.0 <= p <= 1.0 for p in values):
        error_msg = f"{what} has a probability outside [0, 1]"
        raise NegativeProbability(error_msg)
    if abs(math.fsum(values) - 1.0) > tolerance:
        error_msg = f"{what} sums to {math.fsum(values)!r}, not 1"
        raise RowSumError(error_msg)


def total_probability(
    prior: Sequence[float], conditional: Sequence[Sequence[float]], *, tolerance: float = ROW_SUM_TOLERANCE
) -> tuple[float, ...]:
    """Marginalize a conditional distribution over a prior (law of total probability).

    Args:
        prior: Probabilities of the ``m`` conditioning outcomes.
        conditional: ``m × n`` matrix; row ``i`` is the distribution given outcome ``i``.
        tolerance: Allowed deviation of each distribution's sum from one.

    Returns:
        The ``n`` marginal probabilities ``sum_i prior[i] * conditional[i][j]``.

    Raises:
        ShapeMismatch: if the dimensions do not match.
        RowSumError: if the prior or a conditional row does not sum to one.
        NegativeProbability: if a probability is outside [0, 1].
    """
    if len(conditional) != len(prior) or len({len(row) for row in conditional}) > 1:
        error_msg = f"conditional table must have {len(prior)} rows of equal length"
        raise ShapeMismatch(error_msg)
    _check_distribution(prior, "prior", tolerance)
    for i, row in enumerate(conditional, start=1):
        _check_distribution(row, f"conditional row {i}", tolerance)
    marginal = np.asarray(prior, dtype=np.float64) @ np.asarray(conditional, dtype=np.float64)
    return tuple(float(m) for m in marginal)


@dataclass(frozen=True)
class LaunchParameters:
    """Inputs of the product-launch decision.

    Outcomes are ordered (successful, mediocre, negative) throughout.

    Attributes:
        regional_cost: Investment for a regional test launch.
        national_cost: Investment for a national launch.
        unit_profit: Profit per unit sold.
        regional_volumes: Units sold in the regional market, per outcome.
        national_volumes: Units sold in the national market, per outcome.
        prior: Probabilities of the regional outcomes.
        conditional: Row ``i`` holds the national outcome probabilities given regional outcome ``i``.
    """

    regional_cost: float
    national_cost: float
    unit_profit: float
    regional_volumes: tuple[float, float, float]
    national_volumes: tuple[float, float, float]
    prior: tuple[float, float, float]
    conditional: tuple[tuple[float, float, float], ...]

    @classmethod
    def product_launch(cls) -> LaunchParameters:
        """The worked product-launch example. Money amounts and volumes are in thousands."""
        return cls(
            regional_cost=4000.0,
            national_cost=80000.0,
            unit_profit=25.0,
            regional_volumes=(500.0, 200.0, 50.0),
            national_volumes=(10000.0, 5000.0, 1000.0),
            prior=(0.2, 0.7, 0.1),
            conditional=((0.75, 0.2, 0.05), (0.35, 0.5, 0.15), (0.05, 0.3, 0.65)),
        )

    def validate(self, *, tolerance: float = ROW_SUM_TOLERANCE) -> LaunchParameters:
        """Check the parameters.

        Raises:
            ValidationError: if a volume is not positive, or a distribution is invalid.
        """
        volumes = (*self.regional_volumes, *self.national_volumes)
        if len(self.regional_volumes) != len(OUTCOMES) or len(self.national_volumes) != len(OUTCOMES):
            error_msg = f"expected {len(OUTCOMES)} volumes per market"
            raise ShapeMismatch(error_msg)
        if not all(v > 0 for v in volumes):
            error_msg = "sales volumes must be positive"
            raise ValidationError(error_msg)
        total_probability(self.prior, self.conditional, tolerance=tolerance)
        return self


def build_product_launch_tree(params: LaunchParameters) -> Decision:
    """Build the decision tree of the product-launch problem.

    The root offers three alternatives:

    * ``go-national-directly`` (cost: national investment), followed by a chance node over
      the marginal national outcomes;
    * ``test-regionally`` (cost: regional investment), followed by a chance node over the
      regional outcomes. After each outcome the company decides to ``stop``, earning the
      regional revenue, or to ``go-national`` (cost: national investment), earning the
      national revenue according to the matching conditional row on top of the regional revenue;
    * ``do-nothing``.

    Args:
        params: The launch parameters.

    Returns:
        The root decision node.

    Raises:
        ValidationError: if the parameters are invalid.
    """
    params.validate()
    regional_revenue = [volume * params.unit_profit for volume in params.regional_volumes]
    national_revenue = [volume * params.unit_profit for volume in params.national_volumes]
    marginal = total_probability(params.prior, params.conditional)

    direct = Chance(
        branches=tuple(
            ChanceBranch(p, Terminal(revenue, label=outcome), label=outcome)
            for p, revenue, outcome in zip(marginal, national_revenue, OUTCOMES)
        ),
        label="national market",
    )

    after_test = []
    for p_regional, regional, row, outcome in zip(params.prior, regional_revenue, params.conditional, OUTCOMES):
        national = Chance(
            branches=tuple(
                ChanceBranch(p, Terminal(regional + revenue, label=national_outcome), label=national_outcome)
                for p, revenue, national_outcome in zip(row, national_revenue, OUTCOMES)
            ),
            label=f"national market after {outcome} test",
        )
        follow_up = Decision(
            branches=(
                DecisionBranch("stop", 0.0, Terminal(regional, label="stop")),
                DecisionBranch("go-national", -params.national_cost, national),
            ),
            label=f"after {outcome} test",
        )
        after_test.append(ChanceBranch(p_regional, follow_up, label=outcome))

    root = Decision(
        branches=(
            DecisionBranch("go-national-directly", -params.national_cost, direct),
            DecisionBranch("test-regionally", -params.regional_cost, Chance(tuple(after_test), label="regional test")),
            DecisionBranch("do-nothing", 0.0, Terminal(0.0, label="do-nothing")),
        ),
        label="launch",
    )
    logger.debug("Built product-launch tree with marginal national outcomes %r", marginal)
    return root
