#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Exceptions
----------

All exceptions raised by :mod:`lifecyclelib` derive from :exc:`LifecycleError`.
Input problems (unreadable files, invalid models) derive from :exc:`ValueError` as well,
numerical failures from :exc:`ArithmeticError`.

.. autoexception:: LifecycleError
.. autoexception:: ParseError
.. autoexception:: ValidationError
.. autoexception:: RowSumError
.. autoexception:: NegativeProbability
.. autoexception:: ShapeMismatch
.. autoexception:: EmptyActionSet
.. autoexception:: NonFiniteValue
.. autoexception:: DuplicateLabel
.. autoexception:: UnknownState
.. autoexception:: InvalidTree
.. autoexception:: InvalidPolicy
.. autoexception:: NonPositiveTime
.. autoexception:: NumericalError
.. autoexception:: SingularMatrix
.. autoexception:: MultichainSuspected
.. autoexception:: NonUniqueStationary
.. autoexception:: MaxIterationsExceeded
.. autoexception:: TooManyPolicies
"""

from __future__ import annotations

from typing import Sequence


class LifecycleError(Exception):
    """Base class for all exceptions raised by :mod:`lifecyclelib`."""


class ParseError(LifecycleError, ValueError):
    """A problem file could not be read as a model document.

    The exception carries the location of the problem, as far as it is known:
    the file :attr:`path`, the :attr:`line` and :attr:`column` for syntax errors,
    and the dotted :attr:`field` path for structural errors.
    """

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        column: int | None = None,
        field: str | None = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        self.field = field
        context = []
        if path is not None:
            context.append(str(path))
        if line is not None:
            context.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field is not None:
            context.append(f"field {field!r}")
        super().__init__(f"{': '.join(context)}: {message}" if context else message)


class ValidationError(LifecycleError, ValueError):
    """A model violates one or more of its invariants.

    Validation functions collect every violation before raising.
    A single violation is raised as an instance of its specific subclass;
    several violations are raised together as a plain :exc:`ValidationError`.
    In both cases :attr:`violations` holds all of them.
    """

    def __init__(self, message: str, *, location: str = "", violations: Sequence[ValidationError] = ()):
        self.location = location
        self.violations: tuple[ValidationError, ...] = tuple(violations) or (self,)
        super().__init__(f"{location}: {message}" if location else message)

    @classmethod
    def collect(cls, violations: Sequence[ValidationError]) -> None:
        """Raise the collected violations, if there are any."""
        if not violations:
            return
        if len(violations) == 1:
            raise violations[0]
        lines = "\n".join(f"  {violation}" for violation in violations)
        error_msg = f"{len(violations)} violations:\n{lines}"
        raise ValidationError(error_msg, violations=violations)


class _ActionViolation(ValidationError):
    """Violation that can be attributed to a (state, action) pair of a controlled Markov problem."""

    def __init__(self, message: str, *, location: str = "", state: int | None = None, action: int | None = None):
        #: 1-based state index, if applicable.
        self.state = state
        #: 1-based action index, if applicable.
        self.action = action
        if not location and state is not None:
            location = f"state {state}" + (f", action {action}" if action is not None else "")
        super().__init__(message, location=location)


class RowSumError(_ActionViolation):
    """A probability row does not sum to one."""


class NegativeProbability(_ActionViolation):
    """A probability is negative (or otherwise outside [0, 1])."""


class ShapeMismatch(_ActionViolation):
    """A row, matrix, or vector has the wrong length."""


class EmptyActionSet(_ActionViolation):
    """A state has no actions or controls, or a model has no states."""


class NonFiniteValue(_ActionViolation):
    """A reward or probability is NaN or infinite."""


class DuplicateLabel(ValidationError):
    """Two states or controls that must be distinguishable share a label."""


class UnknownState(ValidationError):
    """A distribution refers to a state that does not exist."""


class InvalidTree(ValidationError):
    """A decision tree is malformed (no branches, or a cycle)."""


class InvalidPolicy(LifecycleError, ValueError):
    """A policy vector does not fit the problem it is applied to."""


class NonPositiveTime(LifecycleError, ValueError):
    """Growth indicators are only defined for positive times."""


class NumericalError(LifecycleError, ArithmeticError):
    """Base class for failures of the numerical procedures."""


class SingularMatrix(NumericalError):
    """A linear system has no unique solution (pivot below the relative threshold)."""

    def __init__(self, message: str, *, column: int | None = None):
        #: 0-based column in which elimination failed.
        self.column = column
        super().__init__(message)


class MultichainSuspected(NumericalError):
    """The value-determination system of a policy is singular.

    This indicates that the policy's Markov chain has more than one recurrent class,
    so that a single gain does not describe it.
    """


class NonUniqueStationary(NumericalError):
    """A transition matrix has no unique non-negative stationary distribution."""


class MaxIterationsExceeded(NumericalError):
    """Policy iteration did not converge within the allowed number of iterations."""


class TooManyPolicies(NumericalError):
    """The policy space is too large to enumerate."""
