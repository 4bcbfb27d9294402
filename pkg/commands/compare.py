"""
compare: PP data and quantile deltas of two traces or simulation outputs.
"""
from config import Config
from commands.common import EXIT_OK, add_output_flags, finish_run, print_json, require, resolve
from services.traces import compare_traces, ingest_trace
from storage.artifacts import ArtifactStore

DEFAULTS = {
    'a': None,
    'b': None,
    'grid': Config.PP_GRID_SIZE
}

def register(subparsers):
    parser = subparsers.add_parser('compare', help='compare two sojourn-time samples')
    parser.add_argument('--a', help='directory or jobs CSV')
    parser.add_argument('--b', help='directory or jobs CSV')
    parser.add_argument('--grid', type=int, help=f'PP grid size (default {Config.PP_GRID_SIZE})')
    add_output_flags(parser)
    parser.set_defaults(handler=handle)

def handle(args) -> int:
    resolved = resolve(args, DEFAULTS)
    require(resolved, ('a', 'b'))
    a = ingest_trace(resolved['a'], source_label='a')
    b = ingest_trace(resolved['b'], source_label='b')
    comparison = compare_traces(a, b, int(resolved['grid']))

    store = ArtifactStore(args.output)
    store.write_csv(comparison.pp_frame(), 'compare_pp.csv')
    store.write_csv(comparison.deltas_frame(), 'compare_quantiles.csv')
    finish_run('compare', store, resolved, 0)

    print_json({'max_pp_deviation': comparison.max_deviation, 'quantile_deltas': comparison.quantile_deltas})
    return EXIT_OK
