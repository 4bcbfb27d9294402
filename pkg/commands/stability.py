"""
stability: simulated stability region over k, or the analytical formula table.
"""
from config import Config
from commands.common import (
    EXIT_OK,
    add_output_flags,
    add_system_flags,
    build_system_config,
    finish_run,
    parse_list,
    require,
    resolve
)
from services.stability import stability_formula_table, stability_region_curve
from storage.artifacts import ArtifactStore

DEFAULTS = {
    'model': 'sm',
    'l': None,
    'k': None,
    'k_list': None,
    'l_list': None,
    'kappa_list': None,
    'arrival': 'exp:1',
    'exec': None,
    'overhead': 'none',
    'jobs': Config.STABILITY_JOBS,
    'seed': Config.DEFAULT_SEED,
    'in_sequence': False,
    'warmup': Config.WARMUP_JOBS,
    'resolution': Config.STABILITY_RESOLUTION,
    'threads': Config.DEFAULT_THREADS
}

def register(subparsers):
    parser = subparsers.add_parser('stability', help='maximum stable utilization versus k')
    add_system_flags(parser, f' per trial (default {Config.STABILITY_JOBS})')
    add_output_flags(parser)
    parser.add_argument('--k-list', dest='k_list', help='comma-separated k values')
    parser.add_argument('--l-list', dest='l_list', help='formula table: comma-separated l values')
    parser.add_argument('--kappa-list', dest='kappa_list', help='formula table: comma-separated integer κ values')
    parser.add_argument('--resolution', type=float, help=f'bisection resolution (default {Config.STABILITY_RESOLUTION})')
    parser.add_argument('--threads', type=int, help=f'parallel trials (default {Config.DEFAULT_THREADS})')
    parser.set_defaults(handler=handle)

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    store = ArtifactStore(args.output)

    if resolved['l_list'] or resolved['kappa_list']:
        require(resolved, ('l_list', 'kappa_list'))
        table = stability_formula_table(parse_list(resolved['l_list'], int), parse_list(resolved['kappa_list'], int))
        store.write_csv(table, 'stability_formula.csv')
        finish_run('stability', store, resolved, int(resolved['seed']))
        return EXIT_OK

    require(resolved, ('l', 'k_list'))
    k_values = parse_list(resolved['k_list'], int)
    l = int(resolved['l'])
    # one second of work per worker and job unless a task law is given
    resolved['k'] = resolved['k'] or k_values[0]
    resolved['exec'] = resolved['exec'] or f"exp:{resolved['k'] / l!r}"
    config = build_system_config(resolved)

    curve = stability_region_curve(config, k_values, resolution=float(resolved['resolution']),
                                   n_jobs=int(resolved['jobs']), threads=int(resolved['threads']))
    store.write_csv(curve, f"stability_{config.model.value}_l{l}_seed{config.seed}.csv")
    finish_run('stability', store, resolved, config.seed)
    return EXIT_OK
