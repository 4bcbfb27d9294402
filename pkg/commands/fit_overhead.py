"""
fit-overhead: fit the scheduling overhead model to task and job traces.
"""
from commands.common import EXIT_OK, add_output_flags, finish_run, print_json, require, resolve
from services.overhead_fit import fit_overhead
from services.traces import TraceDataset, ingest_trace
from storage.artifacts import ArtifactStore
from utils.validators import ValidationError

DEFAULTS = {
    'tasks': None,
    'jobs': None,
    'trace': None
}

def register(subparsers):
    parser = subparsers.add_parser('fit-overhead', help='fit the overhead model to traces')
    parser.add_argument('--tasks', nargs='+', help='tasks CSV file(s)')
    parser.add_argument('--jobs', nargs='+', help='jobs CSV file(s), one per tasks file')
    parser.add_argument('--trace', nargs='+', help='trace directories holding *jobs.csv and *tasks.csv')
    add_output_flags(parser)
    parser.set_defaults(handler=handle)

def _datasets(resolved):
    if resolved['trace']:
        return [ingest_trace(path) for path in resolved['trace']]
    require(resolved, ('tasks', 'jobs'))
    if len(resolved['tasks']) != len(resolved['jobs']):
        raise ValidationError("give one jobs file per tasks file", field='jobs')
    return [ingest_trace(jobs, tasks_path=tasks) for tasks, jobs in zip(resolved['tasks'], resolved['jobs'])]

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    dataset = TraceDataset.concat(_datasets(resolved))
    fit = fit_overhead(dataset)

    output = fit.to_dict()
    # report the exponential rate in 1/s like the overhead flag
    output['mu_ts_task_per_s'] = fit.mu_ts_task * 1000.0
    store = ArtifactStore(args.output)
    store.write_json(output, 'overhead_fit.json')
    finish_run('fit-overhead', store, resolved, 0)
    print_json(output)
    return EXIT_OK
