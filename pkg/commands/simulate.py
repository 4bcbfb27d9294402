"""
simulate: run one configuration and write its job/task tables and summary.
"""
from config import Config
from commands.common import (
    EXIT_OK,
    add_output_flags,
    add_system_flags,
    build_system_config,
    finish_run,
    print_json,
    require,
    resolve
)
from services.simulator import run
from storage.artifacts import ArtifactStore

DEFAULTS = {
    'model': None,
    'l': None,
    'k': None,
    'arrival': None,
    'exec': None,
    'overhead': 'none',
    'jobs': Config.DEFAULT_JOBS,
    'seed': Config.DEFAULT_SEED,
    'in_sequence': False,
    'record_tasks': True,
    'warmup': Config.WARMUP_JOBS
}

def register(subparsers):
    parser = subparsers.add_parser('simulate', help='simulate a parallel system')
    add_system_flags(parser, f' (default {Config.DEFAULT_JOBS})')
    add_output_flags(parser)
    parser.add_argument('--no-tasks', dest='record_tasks', action='store_false', default=None,
                        help='do not record the per-task table')
    parser.set_defaults(handler=handle)

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    require(resolved, ('model', 'l', 'k', 'arrival', 'exec'))
    config = build_system_config(resolved)

    result = run(config)
    store = ArtifactStore(args.output)
    store.write_result(result)
    finish_run('simulate', store, resolved, config.seed)

    summary = result.summary()
    print_json({key: summary[key] for key in ('quantiles', 'mean_sojourn', 'mean_waiting', 'stable')})
    return EXIT_OK
