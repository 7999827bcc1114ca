#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

"""
Command line
------------

The ``lifecyclelib`` command (also available as ``python -m lifecyclelib``) solves problem files::

   lifecyclelib validate FILE
   lifecyclelib solve FILE [--initial-policy a,b,...] [--reference-state k] [--max-iterations n] [--trace] [--json]
   lifecyclelib enumerate FILE [--max-policies n] [--json]
   lifecyclelib simulate FILE --policy a,b,... --steps n --seed s [--start k] [--json]
   lifecyclelib tree FILE [--json]
   lifecyclelib stages FILE [--json]
   lifecyclelib classify --t T --x X [--epsilon e] [--json]

Policies, actions, and states are numbered from one.
Results are written to standard output, diagnostics to standard error.
Add ``-v`` (or ``-vv``) before the subcommand for progress logging.

Exit codes:

=====  ==========================================================
0      success
1      the file cannot be read, parsed, or validated
2      numerical failure (singular or multichain system, limits exceeded)
3      usage error (bad arguments, policy does not fit, wrong file kind)
=====  ==========================================================

.. autofunction:: run_cli
.. autofunction:: main
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import TYPE_CHECKING, NoReturn, Sequence, TextIO

from lifecyclelib.config import DEFAULT_MAX_ITERATIONS, MAX_ENUMERATED_POLICIES, STABLE_TOLERANCE, Settings
from lifecyclelib.errors import InvalidPolicy, NumericalError, ParseError, ValidationError
from lifecyclelib.fileformat import Model, parse_problem_file
from lifecyclelib.howard import policy_iteration
from lifecyclelib.model import ControlledMarkovProblem, PolicyVector, classify_growth
from lifecyclelib.report import render_report
from lifecyclelib.stages import StagedModel, backward_induction
from lifecyclelib.tree import rollback
from lifecyclelib.validation import exhaustive_gain_max, simulate

if TYPE_CHECKING:
    from lifecyclelib.report import Result

logger = logging.getLogger(__name__)

PROG = "lifecyclelib"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 3


class UsageError(Exception):
    """Invalid command-line usage."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(prog=PROG, description="Solve product life-cycle decision problems.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (repeat for more detail)")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    validate = commands.add_parser("validate", help="check a problem file")
    validate.add_argument("file")

    solve = commands.add_parser("solve", help="find the gain-optimal policy by policy iteration")
    solve.add_argument("file")
    solve.add_argument("--initial-policy", metavar="A,B,...", help="starting actions, one per state")
    solve.add_argument("--reference-state", type=_positive_int, metavar="K", help="state with relative value zero")
    solve.add_argument("--max-iterations", type=_positive_int, default=DEFAULT_MAX_ITERATIONS, metavar="N")
    solve.add_argument("--trace", action="store_true", help="show the improvement table of every iteration")
    solve.add_argument("--json", action="store_true", help="emit a JSON report")

    enumerate_ = commands.add_parser("enumerate", help="evaluate every policy")
    enumerate_.add_argument("file")
    enumerate_.add_argument("--max-policies", type=_positive_int, default=MAX_ENUMERATED_POLICIES, metavar="N")
    enumerate_.add_argument("--json", action="store_true", help="emit a JSON report")

    simulate_ = commands.add_parser("simulate", help="estimate the gain of a policy by simulation")
    simulate_.add_argument("file")
    simulate_.add_argument("--policy", required=True, metavar="A,B,...", help="actions, one per state")
    simulate_.add_argument("--steps", required=True, type=_positive_int, metavar="N")
    simulate_.add_argument("--seed", required=True, type=_non_negative_int, metavar="S")
    simulate_.add_argument("--start", type=_positive_int, default=1, metavar="K", help="initial state (default 1)")
    simulate_.add_argument("--json", action="store_true", help="emit a JSON report")

    tree = commands.add_parser("tree", help="roll back a decision tree")
    tree.add_argument("file")
    tree.add_argument("--json", action="store_true", help="emit a JSON report")

    stages = commands.add_parser("stages", help="solve a staged model by backward induction")
    stages.add_argument("file")
    stages.add_argument("--json", action="store_true", help="emit a JSON report")

    classify = commands.add_parser("classify", help="classify a growth value")
    classify.add_argument("--t", required=True, type=float, help="time, positive")
    classify.add_argument("--x", required=True, type=float, help="growth value at time t")
    classify.add_argument("--epsilon", type=float, default=STABLE_TOLERANCE, help="tolerance of the stable state")
    classify.add_argument("--json", action="store_true", help="emit a JSON report")
    return parser


def _logging_handler(verbosity: int, stream: TextIO) -> logging.Handler:
    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler.setLevel(logging.DEBUG if verbosity >= 2 else logging.INFO if verbosity == 1 else logging.WARNING)
    return handler


def _load(path: str, kind: type[ControlledMarkovProblem] | type[StagedModel] | None = None) -> Model:
    model = parse_problem_file(path)
    if kind is not None and not isinstance(model, kind):
        expected = "controlled Markov problem" if kind is ControlledMarkovProblem else "staged model"
        error_msg = f"{path} does not contain a {expected}"
        raise UsageError(error_msg)
    return model


def _describe(model: Model) -> str:
    if isinstance(model, ControlledMarkovProblem):
        return f"controlled Markov problem with {model.n_states} states and {model.policy_count} policies"
    if isinstance(model, StagedModel):
        return f"staged model with {len(model.stages)} stages"
    return "decision tree"


def _run(args: argparse.Namespace, settings: Settings, out: TextIO) -> int:
    mode = "machine" if getattr(args, "json", False) else "human"
    result: Result
    source: ControlledMarkovProblem | StagedModel | None = None

    if args.command == "validate":
        model = _load(args.file)
        warnings = model.warnings if isinstance(model, StagedModel) else ()
        out.write(f"{args.file}: valid {_describe(model)}, {len(warnings)} warning(s)\n")
        for warning in warnings:
            out.write(f"  warning: {warning}\n")
        return EXIT_OK

    if args.command == "solve":
        problem = _load(args.file, ControlledMarkovProblem)
        assert isinstance(problem, ControlledMarkovProblem)
        initial = PolicyVector.parse(args.initial_policy) if args.initial_policy else None
        reference = args.reference_state - 1 if args.reference_state is not None else None
        if reference is not None and reference >= problem.n_states:
            error_msg = f"reference state {args.reference_state} out of range for {problem.n_states} states"
            raise UsageError(error_msg)
        result = policy_iteration(problem, initial, reference, max_iterations=args.max_iterations)
        source = problem
    elif args.command == "enumerate":
        problem = _load(args.file, ControlledMarkovProblem)
        assert isinstance(problem, ControlledMarkovProblem)
        result = exhaustive_gain_max(problem, max_policies=args.max_policies)
    elif args.command == "simulate":
        problem = _load(args.file, ControlledMarkovProblem)
        assert isinstance(problem, ControlledMarkovProblem)
        if args.start > problem.n_states:
            error_msg = f"start state {args.start} out of range for {problem.n_states} states"
            raise UsageError(error_msg)
        policy = PolicyVector.parse(args.policy)
        result = simulate(problem, policy, start_state=args.start - 1, steps=args.steps, seed=args.seed)
    elif args.command == "tree":
        tree = _load(args.file)
        if isinstance(tree, (ControlledMarkovProblem, StagedModel)):
            error_msg = f"{args.file} does not contain a decision tree"
            raise UsageError(error_msg)
        result = rollback(tree)
    elif args.command == "stages":
        model = _load(args.file, StagedModel)
        assert isinstance(model, StagedModel)
        result = backward_induction(model)
        source = model
    else:
        result = classify_growth(args.t, args.x, args.epsilon)

    out.write(render_report(result, mode, settings=settings, source=source, trace=getattr(args, "trace", False)))
    return EXIT_OK


def run_cli(argv: Sequence[str] | None = None, *, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Run the command line.

    Args:
        argv: The arguments, without the program name. Defaults to :data:`sys.argv`.
        stdout: Stream for results. Defaults to :data:`sys.stdout`.
        stderr: Stream for diagnostics. Defaults to :data:`sys.stderr`.

    Returns:
        The exit code.
    """
    out = sys.stdout if stdout is None else stdout
    err = sys.stderr if stderr is None else stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(err)
        err.write(f"{PROG}: error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    package_logger = logging.getLogger("lifecyclelib")
    handler = _logging_handler(args.verbose, err)
    previous_level = package_logger.level
    package_logger.addHandler(handler)
    package_logger.setLevel(handler.level)
    try:
        return _run(args, Settings.from_environment(), out)
    except (ParseError, ValidationError, OSError) as exc:
        err.write(f"{PROG}: error: {exc}\n")
        return EXIT_INPUT
    except NumericalError as exc:
        err.write(f"{PROG}: numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except (UsageError, InvalidPolicy) as exc:
        err.write(f"{PROG}: usage error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        # Remaining value errors are inputs outside a command's domain, e.g. t <= 0.
        err.write(f"{PROG}: error: {exc}\n")
        return EXIT_INPUT
    finally:
        package_logger.removeHandler(handler)
        package_logger.setLevel(previous_level)


def main() -> NoReturn:
    """Entry point of the ``lifecyclelib`` command."""
    sys.exit(run_cli())
