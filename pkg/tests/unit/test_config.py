#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""Tests for the run-time settings and the configured limits."""

from __future__ import annotations

import inspect
from typing import Callable

import pytest

from lifecyclelib import Settings, exhaustive_gain_max
from lifecyclelib.config import (
    DEFAULT_PRECISION,
    MAX_DECISION_NODES,
    MAX_ENUMERATED_POLICIES,
    MAX_STAGED_CONTROLS,
    NEGATIVE_TOLERANCE,
    PRECISION_VARIABLE,
)
from lifecyclelib.validation import exhaustive_strategy_max, forward_enumeration_max


class TestSettings:
    def test_default(self) -> None:
        assert Settings.from_environment({}).precision == DEFAULT_PRECISION == 3

    @pytest.mark.parametrize(("raw", "expected"), [("0", 0), ("6", 6), ("17", 17)])
    def test_valid_precision(self, raw: str, expected: int) -> None:
        assert Settings.from_environment({PRECISION_VARIABLE: raw}).precision == expected

    @pytest.mark.parametrize("raw", ["-1", "18", "three", ""])
    def test_invalid_precision_is_ignored(self, raw: str, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level("WARNING", logger="lifecyclelib.config"):
            settings = Settings.from_environment({PRECISION_VARIABLE: raw})
        assert settings.precision == DEFAULT_PRECISION
        assert PRECISION_VARIABLE in caplog.text

    def test_reads_process_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv(PRECISION_VARIABLE, "1")
        assert Settings.from_environment() == Settings(precision=1)


class TestLimits:
    """The enumeration limits of the independent checks are taken from the configuration."""

    @pytest.mark.parametrize(
        ("function", "parameter", "limit"),
        [
            (exhaustive_gain_max, "max_policies", MAX_ENUMERATED_POLICIES),
            (exhaustive_strategy_max, "max_decision_nodes", MAX_DECISION_NODES),
            (forward_enumeration_max, "max_controls", MAX_STAGED_CONTROLS),
        ],
    )
    def test_default_limits(self, function: Callable[..., object], parameter: str, limit: int) -> None:
        assert inspect.signature(function).parameters[parameter].default == limit

    def test_limit_values(self) -> None:
        assert (MAX_DECISION_NODES, MAX_STAGED_CONTROLS, NEGATIVE_TOLERANCE) == (12, 10, 1e-9)
