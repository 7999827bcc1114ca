#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.


"""
Introduction
------------

The :mod:`lifecyclelib` package solves the decision problems that arise over the life cycle of a product:

* Long-run, infinite-horizon decisions are modelled as a controlled Markov problem.
  In each state the owner chooses an action, which determines the transition probabilities
  to the next state and the rewards earned along the way.
  Howard's policy iteration finds the policy with the largest average reward per period (the *gain*).
* One-off strategic decisions, such as whether to test a product regionally before a national launch,
  are modelled as decision trees and evaluated by expected-value rollback.
* Finite-horizon decisions are modelled as staged models and solved by backward induction.

Every solver has an independent check: exhaustive enumeration of all policies or strategies,
and a seeded simulator that estimates the gain of a policy.

The package includes the problems of its worked examples as data files,
and a command-line interface (:mod:`lifecyclelib.cli`).

Models
------

.. automodule:: lifecyclelib.model

Solvers
-------

.. automodule:: lifecyclelib.linalg
.. automodule:: lifecyclelib.howard
.. automodule:: lifecyclelib.tree
.. automodule:: lifecyclelib.stages
.. automodule:: lifecyclelib.validation

Files and reports
-----------------

.. automodule:: lifecyclelib.fileformat
.. automodule:: lifecyclelib.report
.. automodule:: lifecyclelib.cli
.. automodule:: lifecyclelib.config

Exceptions
----------

.. automodule:: lifecyclelib.errors
"""

from lifecyclelib.config import Settings
from lifecyclelib.errors import (
    InvalidPolicy,
    LifecycleError,
    MaxIterationsExceeded,
    MultichainSuspected,
    NonPositiveTime,
    NonUniqueStationary,
    NumericalError,
    ParseError,
    SingularMatrix,
    TooManyPolicies,
    ValidationError,
)
from lifecyclelib.fileformat import dataset_path, dump_problem, parse_document, parse_problem_file, to_document
from lifecyclelib.howard import IterationTrace, improve_policy, policy_iteration, value_determination
from lifecyclelib.linalg import DenseSystem, solve_dense
from lifecyclelib.model import (
    ActionSpec,
    ControlledMarkovProblem,
    GainBiasSolution,
    GrowthIndicators,
    GrowthState,
    PolicyVector,
    classify_growth,
    expected_immediate_reward,
    policy_matrices,
    validate_problem,
)
from lifecyclelib.report import render_report
from lifecyclelib.stages import (
    Control,
    StagedModel,
    StageValues,
    backward_induction,
    evaluate_initial,
    validate_staged_model,
)
from lifecyclelib.tree import (
    Chance,
    ChanceBranch,
    Decision,
    DecisionBranch,
    LaunchParameters,
    RolledBackTree,
    Terminal,
    build_product_launch_tree,
    rollback,
    total_probability,
    validate_tree,
)
from lifecyclelib.validation import exhaustive_gain_max, simulate, stationary_distribution

__all__ = [
    "ActionSpec",
    "ControlledMarkovProblem",
    "PolicyVector",
    "GainBiasSolution",
    "GrowthState",
    "GrowthIndicators",
    "validate_problem",
    "expected_immediate_reward",
    "policy_matrices",
    "classify_growth",
    "DenseSystem",
    "solve_dense",
    "IterationTrace",
    "value_determination",
    "improve_policy",
    "policy_iteration",
    "Terminal",
    "Decision",
    "DecisionBranch",
    "Chance",
    "ChanceBranch",
    "RolledBackTree",
    "LaunchParameters",
    "validate_tree",
    "rollback",
    "total_probability",
    "build_product_launch_tree",
    "Control",
    "StagedModel",
    "StageValues",
    "validate_staged_model",
    "backward_induction",
    "evaluate_initial",
    "stationary_distribution",
    "exhaustive_gain_max",
    "simulate",
    "parse_problem_file",
    "parse_document",
    "to_document",
    "dump_problem",
    "dataset_path",
    "render_report",
    "Settings",
    "LifecycleError",
    "ParseError",
    "ValidationError",
    "InvalidPolicy",
    "NonPositiveTime",
    "NumericalError",
    "SingularMatrix",
    "MultichainSuspected",
    "NonUniqueStationary",
    "MaxIterationsExceeded",
    "TooManyPolicies",
]
