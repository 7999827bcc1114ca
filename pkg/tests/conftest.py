#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""Fixtures shared by the unit and integration tests."""

from __future__ import annotations

from fractions import Fraction

import pytest

from lifecyclelib import ControlledMarkovProblem, PolicyVector, StagedModel, dataset_path, parse_problem_file
from lifecyclelib.stages import Control


@pytest.fixture(scope="session")
def dealership() -> ControlledMarkovProblem:
    """The five-city dealership problem."""
    problem = parse_problem_file(dataset_path("dealership.mdp"))
    assert isinstance(problem, ControlledMarkovProblem)
    return problem


@pytest.fixture
def radio_everywhere() -> PolicyVector:
    """The starting policy of the dealership example: action 1 in every city."""
    return PolicyVector.from_external([1, 1, 1, 1, 1])


@pytest.fixture
def improved_policy() -> PolicyVector:
    """The policy chosen by the first improvement step of the dealership example."""
    return PolicyVector.from_external([5, 4, 5, 4, 4])


def _control(label: str, reward: float, **dist: str) -> Control:
    return Control(label, reward, tuple((target, float(Fraction(p))) for target, p in dist.items()))


@pytest.fixture
def staged_example() -> StagedModel:
    """The three-stage example, built in code (the bundled file holds the same model)."""
    return StagedModel(
        stages=(("I",), ("III", "IV", "V"), ("T1", "T2")),
        controls=(
            (
                (
                    _control("I.1", 1, III="3/10", IV="1/2", V="1/5"),
                    _control("I.2", 0, III="0", IV="1/4", V="3/8"),
                ),
            ),
            (
                (_control("III.1", 0, T1="1/2", T2="1/2"), _control("III.2", 1, T1="1/4", T2="3/4")),
                (_control("IV.1", 2, T1="5/6", T2="1/6"), _control("IV.2", 1, T1="5/8", T2="3/8")),
                (_control("V.1", 3, T1="2/5", T2="3/5"), _control("V.2", 2, T1="1", T2="0")),
            ),
        ),
        terminal_rewards=(1.0, 2.0),
        initial_distribution=(1.0,),
        allow_substochastic=True,
    )
