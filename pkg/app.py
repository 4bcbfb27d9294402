"""
Command-line entry point for the tiny-tasks parallel systems toolkit.
"""
import sys
from typing import List, Optional
from config import Config
from commands import bound, compare, fit_overhead, simulate, stability, sweep
from commands.common import EXIT_RUNTIME, EXIT_USAGE, CliArgumentParser
from services.traces import SchemaError
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

COMMANDS = (simulate, bound, stability, sweep, compare, fit_overhead)

def create_parser() -> CliArgumentParser:
    """Create the argument parser with one sub-command per command module."""
    parser = CliArgumentParser(
        prog=Config.TOOL_NAME,
        description='Simulation and stochastic network-calculus bounds for parallel systems with tiny tasks.'
    )
    parser.add_argument('--version', action='version', version=f'{Config.TOOL_NAME} {Config.TOOL_VERSION}')
    subparsers = parser.add_subparsers(dest='command', parser_class=CliArgumentParser)
    subparsers.required = True

    for command in COMMANDS:
        command.register(subparsers)

    return parser

def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        Exit code: 0 success (including infeasible bounds), 1 usage, validation
        or trace schema error, 2 runtime error
    """
    parser = create_parser()
    args = parser.parse_args(argv)

    try:
        return args.handler(args)
    except ValidationError as e:
        field = f" ({e.field})" if e.field else ''
        print(f"{Config.TOOL_NAME} {args.command}: error{field}: {e}", file=sys.stderr)
        log_with_context(logger, 'WARNING', f'Invalid input: {e}', command=args.command)
        return EXIT_USAGE
    except SchemaError as e:
        print(f"{Config.TOOL_NAME} {args.command}: schema error: {e}", file=sys.stderr)
        log_with_context(logger, 'WARNING', f'Trace schema error: {e}', command=args.command,
                         context={'path': e.path, 'missing': e.missing})
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f'{args.command} failed: {str(e)}', extra={'command': args.command})
        print(f"{Config.TOOL_NAME} {args.command}: runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME

if __name__ == '__main__':
    sys.exit(main())
