"""
sweep: vary k, lambda or l and tabulate simulated quantiles against bounds.
"""
from config import Config
from commands.common import (
    EXIT_OK,
    EXIT_RUNTIME,
    RATE_SCALE,
    add_output_flags,
    add_system_flags,
    build_system_config,
    finish_run,
    parse_list,
    require,
    resolve
)
from services.sweeps import SweepSpec, run_sweep
from storage.artifacts import ArtifactStore
from utils.logger import logger

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
    'warmup': Config.WARMUP_JOBS,
    'vary': 'k',
    'values': None,
    'eps_list': '0.01',
    'simulate': True,
    'analytical': True,
    'pin_mu': False,
    'threads': Config.DEFAULT_THREADS
}

def register(subparsers):
    parser = subparsers.add_parser('sweep', help='parameter sweep with analytical comparison')
    add_system_flags(parser, f' per row (default {Config.DEFAULT_JOBS})')
    add_output_flags(parser)
    parser.add_argument('--vary', choices=['k', 'lambda', 'l'])
    parser.add_argument('--values', help='comma-separated values (lambda in 1/s)')
    parser.add_argument('--eps-list', dest='eps_list', help='comma-separated violation probabilities')
    parser.add_argument('--no-sim', dest='simulate', action='store_false', default=None, help='analytical rows only')
    parser.add_argument('--no-analytical', dest='analytical', action='store_false', default=None,
                        help='simulated rows only')
    parser.add_argument('--pin-mu', dest='pin_mu', action='store_true', default=None,
                        help='keep the task law when varying k')
    parser.add_argument('--threads', type=int, help=f'parallel rows (default {Config.DEFAULT_THREADS})')
    parser.set_defaults(handler=handle)

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    require(resolved, ('model', 'l', 'k', 'arrival', 'exec', 'values'))
    base = build_system_config(resolved)

    cast = float if resolved['vary'] == 'lambda' else int
    values = parse_list(resolved['values'], cast)
    if resolved['vary'] == 'lambda':
        values = [v * RATE_SCALE for v in values]

    spec = SweepSpec(
        base=base,
        vary=resolved['vary'],
        values=values,
        epsilon_list=parse_list(resolved['eps_list']),
        compare_analytical=bool(resolved['analytical']),
        simulate=bool(resolved['simulate']),
        pin_mu=bool(resolved['pin_mu']),
        threads=int(resolved['threads'])
    )
    result = run_sweep(spec)

    store = ArtifactStore(args.output)
    stem = f"sweep_{base.model.value}_l{base.l}_{spec.vary}_seed{base.seed}"
    store.write_csv(result.rows, f'{stem}.csv')
    if spec.compare_analytical:
        store.write_csv(result.bounds, f'{stem}_bounds.csv')
    finish_run('sweep', store, resolved, base.seed)

    if result.failed and len(result.failed) == len(values):
        logger.error('Every sweep row failed')
        return EXIT_RUNTIME
    return EXIT_OK
