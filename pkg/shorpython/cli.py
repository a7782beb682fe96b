"""Command-line front end: ``shorpython factor|order|resources|emit|verify``.

Exit codes: 0 success, 1 usage, validation or IO error, 2 factoring or order finding gave up,
3 a verification suite failed. Prime N exhausts every attempt and exits with 2.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from shorpython import __version__, exceptions, numtheory, orderfind, resources, verification
from shorpython.blocks import BLOCK_NAMES, build_block
from shorpython.core import circuit_to_json
from shorpython.helpers import formatting
from shorpython.models import CliConfig
from shorpython.simulator import make_rng

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_GAVE_UP = 2
EXIT_VERIFY_FAILED = 3

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped onto exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, "%s: error: %s\n" % (self.prog, message))


def _kmax(text: str):
    if text == "exact":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("kmax must be a positive integer or 'exact'")
    if value < 1:
        raise argparse.ArgumentTypeError("kmax must be at least 1, got %d" % value)
    return value


def _common_options() -> argparse.ArgumentParser:
    # SUPPRESS keeps unset flags out of the namespace so SHORPYTHON_* variables apply
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="64-bit seed (default: SHORPYTHON_SEED or entropy)")
    common.add_argument("--kmax", type=_kmax, help="QFT truncation: integer or 'exact'")
    common.add_argument("--max-attempts", dest="max_attempts", type=int, help="attempt limit")
    common.add_argument("--a", type=int, help="force the base a")
    common.add_argument(
        "--format", dest="output_format", choices=("text", "json", "csv"), help="report format"
    )
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("-v", "--verbose", action="count", help="-v for INFO, -vv for DEBUG")
    return common


def build_parser() -> ArgumentParser:
    common = _common_options()
    parser = ArgumentParser(
        prog="shorpython",
        description="Shor's algorithm on a 2n+3 qubit semiclassical circuit",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    commands = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    commands.required = True

    factor = commands.add_parser("factor", parents=[common], help="find a factor of N")
    factor.add_argument("N", type=int)
    factor.set_defaults(handler=cmd_factor)

    order = commands.add_parser("order", parents=[common], help="order of a modulo N")
    order.add_argument("N", type=int)
    order.add_argument("base", type=int, metavar="a")
    order.set_defaults(handler=cmd_order)

    estimate = commands.add_parser("resources", parents=[common], help="count qubits and gates")
    estimate.add_argument("n", type=int, nargs="+", help="bit length(s) of N")
    estimate.set_defaults(handler=cmd_resources)

    emit = commands.add_parser("emit", parents=[common], help="write a circuit as JSON")
    emit.add_argument("N", type=int)
    emit.add_argument("base", type=int, metavar="a")
    emit.add_argument("-o", "--output", help="file to write (default: stdout)")
    emit.add_argument("--block", choices=BLOCK_NAMES, help="emit one block instead")
    emit.set_defaults(handler=cmd_emit)

    verify = commands.add_parser("verify", parents=[common], help="run the oracle suites")
    verify.add_argument(
        "--suite", action="append", choices=list(verification.SUITES), help="repeatable"
    )
    verify.set_defaults(handler=cmd_verify)
    return parser


def load_config(args: argparse.Namespace) -> CliConfig:
    """CliConfig from the environment, overridden by the flags given on the command line."""
    overrides = {
        field: getattr(args, field)
        for field in CliConfig.__fields__
        if hasattr(args, field)
    }
    config = CliConfig(**overrides)
    if config.seed is None:
        entropy = np.random.SeedSequence().generate_state(1, np.uint64)[0]
        config = config.copy(update={"seed": int(entropy)})
    return config


def _emit_json(document):
    print(json.dumps(document, indent=2))


def cmd_factor(args, config: CliConfig) -> int:
    if args.N < 4:
        print("N must be at least 4, got %d" % args.N, file=sys.stderr)
        return EXIT_ERROR
    try:
        result = numtheory.shor_factor(args.N, config, make_rng(config.seed))
    except exceptions.FactoringError as e:
        print(str(e), file=sys.stderr)
        if config.output_format == "json":
            _emit_json(
                {
                    "N": args.N,
                    "factor": None,
                    "seed": config.seed,
                    "attempts": [json.loads(attempt.json()) for attempt in e.attempts],
                }
            )
        return EXIT_GAVE_UP
    if config.output_format == "json":
        print(result.json(indent=2))
    else:
        print(formatting.format_factorization(result))
    return EXIT_OK


def cmd_order(args, config: CliConfig) -> int:
    N, a = args.N, args.base
    if N < 3 or not 1 < a < N:
        print("expected N >= 3 and 1 < a < N, got N=%d a=%d" % (N, a), file=sys.stderr)
        return EXIT_ERROR
    common = numtheory.gcd(a, N)
    if common != 1:
        print("gcd(%d, %d) = %d: a has no order modulo N" % (a, N, common), file=sys.stderr)
        return EXIT_ERROR

    rng = make_rng(config.seed)
    kmax = config.kmax_for(N.bit_length())
    for attempt in range(1, config.max_attempts + 1):
        result = orderfind.find_order(N, a, kmax=kmax, rng=rng)
        if result.validated:
            break
        logger.warning("run %d: m=%d gave no order", attempt, result.record.m)

    if config.output_format == "json":
        _emit_json(dict(result.export(), N=N, a=a, seed=config.seed, runs=attempt))
    else:
        print(formatting.format_order(result))
        print("runs: %d seed: %d" % (attempt, config.seed))
    return EXIT_OK if result.validated else EXIT_GAVE_UP


def cmd_resources(args, config: CliConfig) -> int:
    reports = [resources.estimate(n, config.kmax_for(n)) for n in args.n]
    scaling = None
    widths = set(args.n)
    if len(widths) >= 3 and max(widths) <= resources.MAX_CONSTRUCTED_N:
        rule = None if config.kmax is None else config.kmax_for
        scaling = resources.scaling_report(widths, rule, workers=config.workers)

    if config.output_format == "csv":
        sys.stdout.write(resources.report_csv(reports))
    elif config.output_format == "json":
        _emit_json(
            {
                "reports": [json.loads(report.json()) for report in reports],
                "scaling": json.loads(scaling.json()) if scaling else None,
            }
        )
    else:
        print("\n".join(formatting.format_resource_report(report) for report in reports))
        if scaling:
            print(formatting.format_scaling(scaling))
    return EXIT_OK


def cmd_emit(args, config: CliConfig) -> int:
    N, a = args.N, args.base
    n = N.bit_length()
    kmax = config.kmax_for(n)
    if args.block:
        circuit = build_block(args.block, n, a, N, kmax)
    else:
        circuit = orderfind.build_order_finding_circuit(N, a, kmax)
    document = circuit_to_json(circuit, indent=2)
    if args.output:
        with open(args.output, "w") as f:
            f.write(document)
        logger.info("wrote %d gates to %s", len(circuit), args.output)
    else:
        print(document)
    return EXIT_OK


def cmd_verify(args, config: CliConfig) -> int:
    results = verification.run_suites(args.suite, workers=config.workers)
    if config.output_format == "json":
        _emit_json([json.loads(result.json()) for result in results])
    else:
        print(formatting.format_suites(results))
    failed = [result.name for result in results if not result.ok]
    if failed:
        print("failing suite(s): %s" % ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    verbosity = min(getattr(args, "verbose", 0), len(_LOG_LEVELS) - 1)
    logging.basicConfig(
        level=_LOG_LEVELS[verbosity], format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        config = load_config(args)
        return args.handler(args, config)
    except ValidationError as e:
        print("invalid configuration:\n%s" % e, file=sys.stderr)
    except exceptions.ShorpythonError as e:
        print(str(e), file=sys.stderr)
    except OSError as e:
        print("cannot write output: %s" % e, file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
