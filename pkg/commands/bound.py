"""
bound: analytical sojourn/waiting bound of one model, printed as JSON.

Rates are given in s⁻¹; tau is reported in seconds and in ms.
"""
from commands.common import EXIT_OK, add_output_flags, finish_run, parse_overhead, print_json, require, resolve
from services.bounds import (
    approx_sojourn_fj_overhead,
    approx_sojourn_sm_overhead,
    bound_forkjoin_conventional,
    bound_forkjoin_tiny,
    bound_ideal_partition,
    bound_single_server,
    bound_splitmerge_big,
    bound_splitmerge_tiny
)
from services.envelopes import ModelParams, envelope_arrival_exponential, envelope_exponential_service
from storage.artifacts import ArtifactStore
from utils.validators import ValidationError

MODELS = ('mm1', 'sm-tiny', 'sm-big', 'fj', 'fj-tiny', 'ideal')
MS_PER_S = 1000.0

DEFAULTS = {
    'model': None,
    'l': 1,
    'k': None,
    'lam': None,
    'mu': None,
    'eps': None,
    'metric': 'sojourn',
    'task_index': None,
    'overhead': 'none'
}

def register(subparsers):
    parser = subparsers.add_parser('bound', help='analytical quantile bound')
    parser.add_argument('--model', choices=MODELS)
    parser.add_argument('--l', type=int, help='number of workers (default 1)')
    parser.add_argument('--k', type=int, help='tasks per job (default l)')
    parser.add_argument('--lambda', dest='lam', type=float, help='arrival rate in 1/s')
    parser.add_argument('--mu', type=float, help='task service rate in 1/s')
    parser.add_argument('--eps', type=float, help='violation probability')
    parser.add_argument('--metric', choices=['waiting', 'sojourn'])
    parser.add_argument('--task-index', dest='task_index', type=int,
                        help='fj-tiny: waiting time of task i instead of the sojourn time')
    parser.add_argument('--overhead', help='none, paper or c_ts_ms:mu_ts_per_s:c_pd_job_ms:c_pd_task_ms '
                                           '(sm-tiny, fj-tiny)')
    add_output_flags(parser)
    parser.set_defaults(handler=handle)

def compute(resolved) -> dict:
    model = resolved['model']
    l = int(resolved['l'])
    k = int(resolved['k'] if resolved['k'] is not None else l)
    lam, mu, eps, metric = float(resolved['lam']), float(resolved['mu']), float(resolved['eps']), resolved['metric']
    # seconds throughout; overhead converted from ms
    overhead = parse_overhead(resolved['overhead']).scaled(1.0 / MS_PER_S)
    with_overhead = not overhead.is_zero
    if with_overhead and model not in ('sm-tiny', 'fj-tiny'):
        raise ValidationError(f"overhead approximation is available for sm-tiny and fj-tiny, not {model}",
                              field='overhead')

    if model == 'mm1':
        result = bound_single_server(envelope_exponential_service(mu), envelope_arrival_exponential(lam),
                                     eps, metric, label='mm1')
    else:
        params = ModelParams(l=l, k=k, lam=lam, mu=mu, overhead=overhead if with_overhead else None)
        if model == 'sm-tiny':
            result = approx_sojourn_sm_overhead(params, eps) if with_overhead else bound_splitmerge_tiny(params, eps, metric)
        elif model == 'sm-big':
            result = bound_splitmerge_big(params, eps, metric)
        elif model == 'fj':
            result = bound_forkjoin_conventional(params, eps)
        elif model == 'fj-tiny':
            if with_overhead:
                result = approx_sojourn_fj_overhead(params, eps)
            else:
                task_index = resolved['task_index'] if metric == 'waiting' else None
                if metric == 'waiting' and task_index is None:
                    task_index = 1
                result = bound_forkjoin_tiny(params, eps, task_index)
        else:
            result = bound_ideal_partition(params, eps, metric)

    output = result.to_dict()
    output['tau_ms'] = result.tau * MS_PER_S if result.feasible else None
    return output

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    require(resolved, ('model', 'lam', 'mu', 'eps'))
    output = compute(resolved)
    print_json(output)
    finish_run('bound', ArtifactStore(args.output), resolved, 0)
    return EXIT_OK
