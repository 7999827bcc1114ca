#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Configuration
-------------

Numerical tolerances are module-level constants.
Every operation that uses one accepts a keyword argument to override it.

.. autodata:: ROW_SUM_TOLERANCE
.. autodata:: PIVOT_TOLERANCE
.. autodata:: TIE_TOLERANCE
.. autodata:: STABLE_TOLERANCE
.. autodata:: DEFAULT_MAX_ITERATIONS
.. autodata:: MAX_ENUMERATED_POLICIES
.. autodata:: PER_POLICY_LIMIT
.. autodata:: NEGATIVE_TOLERANCE
.. autodata:: MAX_DECISION_NODES
.. autodata:: MAX_STAGED_CONTROLS

The only setting read from the environment is the number of decimals used in human-readable reports.

.. autoclass:: Settings
   :members:
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Mapping

logger = logging.getLogger(__name__)

#: Maximum deviation of a probability row sum from one.
ROW_SUM_TOLERANCE = 1e-9
#: Relative pivot threshold of the dense solver.
PIVOT_TOLERANCE = 1e-10
#: Test values within this distance of the maximum count as ties.
TIE_TOLERANCE = 1e-9
#: Growth rates within this distance of zero classify as stable.
STABLE_TOLERANCE = 1e-12
#: Default iteration limit of policy iteration.
DEFAULT_MAX_ITERATIONS = 1000
#: Largest policy space that exhaustive enumeration accepts.
MAX_ENUMERATED_POLICIES = 10**7
#: Largest policy space for which every (policy, gain) pair is kept.
PER_POLICY_LIMIT = 10**5
#: Stationary components below minus this value mean the solution is not a distribution.
NEGATIVE_TOLERANCE = 1e-9
#: Largest number of decision nodes for exhaustive strategy enumeration of a tree.
MAX_DECISION_NODES = 12
#: Largest total number of controls for forward enumeration of a staged model.
MAX_STAGED_CONTROLS = 10

PRECISION_VARIABLE = "LIFECYCLELIB_PRECISION"
DEFAULT_PRECISION = 3


@dataclass(frozen=True)
class Settings:
    """Run-time settings.

    Attributes:
        precision: Number of decimal places used for money amounts in human-readable reports.
    """

    precision: int = DEFAULT_PRECISION

    @classmethod
    def from_environment(cls, environ: Mapping[str, str] | None = None) -> Settings:
        """Read the settings from the environment.

        An invalid :envvar:`LIFECYCLELIB_PRECISION` value is ignored with a warning.

        Args:
            environ: The environment to read. Defaults to :data:`os.environ`.

        Returns:
            The settings.
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(PRECISION_VARIABLE)
        if raw is None:
            return cls()
        try:
            precision = int(raw)
        except ValueError:
            precision = -1
        if not 0 <= precision <= 17:
            logger.warning("Ignoring %s=%r: expected an integer in 0..17", PRECISION_VARIABLE, raw)
            return cls()
        return cls(precision=precision)
