"""
Shared command-line plumbing: flag grammar, config-file merge, unit conversion.

I/O units: times in ms, rates in s⁻¹. Internally rates are 1/ms, so every
rate crosses this boundary through RATE_SCALE.
"""
import argparse
import json
import sys
from typing import Any, Dict, Iterable, List, Optional
from config import Config
from services.overhead import OverheadParams
from services.simulator import SystemConfig
from services.stochastic import Distribution
from storage.artifacts import ArtifactStore
from storage.manifest import RunManifest, config_digest
from utils.logger import bind_run, logger, log_with_context
from utils.validators import ValidationError, validate_config_file

RATE_SCALE = 1e-3  # s⁻¹ → ms⁻¹

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)

def parse_distribution(text: str) -> Distribution:
    """Flag grammar with rates in s⁻¹ and values in ms."""
    return Distribution.from_flag(text, rate_scale=RATE_SCALE)

def format_distribution(dist: Distribution) -> str:
    return dist.to_flag(rate_scale=RATE_SCALE)

OVERHEAD_PRESETS = ('paper', 'measured')

def parse_overhead(text: Optional[str]) -> OverheadParams:
    """
    Overhead flag: 'none', 'paper' (alias 'measured') or c_ts_ms:mu_ts_per_s:c_pd_job_ms:c_pd_task_ms.
    """
    if text is None or text == 'none':
        return OverheadParams()
    if text in OVERHEAD_PRESETS:
        return OverheadParams.measured()
    parts = text.split(':')
    if len(parts) != 4:
        raise ValidationError(f"malformed overhead '{text}' (expected none, paper or c_ts:mu_ts:c_pd_job:c_pd_task)",
                              field='overhead')
    try:
        c_ts, mu_ts, c_pd_job, c_pd_task = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"malformed overhead '{text}'", field='overhead')
    return OverheadParams(c_ts, mu_ts * RATE_SCALE, c_pd_job, c_pd_task)

def format_overhead(overhead: OverheadParams) -> str:
    if overhead.is_zero:
        return 'none'
    if overhead == OverheadParams.measured():
        return 'paper'
    return (f"{overhead.c_ts_task!r}:{overhead.mu_ts_task / RATE_SCALE!r}:"
            f"{overhead.c_pd_job!r}:{overhead.c_pd_task!r}")

def parse_list(text: str, cast=float) -> List[Any]:
    try:
        values = [cast(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise ValidationError(f"malformed list '{text}'", field='list')
    if not values:
        raise ValidationError("list must not be empty", field='list')
    return values

def load_config_file(path: Optional[str], allowed: Iterable[str]) -> Dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding='utf-8') as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError(f"cannot read config file {path}: {e}", field='config')
    is_valid, error = validate_config_file(data, set(allowed))
    if not is_valid:
        raise ValidationError(error, field='config')
    return data

def resolve(args: argparse.Namespace, defaults: Dict[str, Any]) -> Dict[str, Any]:
    """
    Resolved settings with precedence defaults < config file < flags.

    Flags left at None count as not given.
    """
    resolved = dict(defaults)
    resolved.update(load_config_file(getattr(args, 'config', None), defaults.keys()))
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    if getattr(args, 'command', None):
        bind_run(config_digest(resolved)[:12], args.command)
    return resolved

def build_system_config(resolved: Dict[str, Any]) -> SystemConfig:
    return SystemConfig(
        model=resolved['model'],
        l=int(resolved['l']),
        k=int(resolved['k']),
        arrival=parse_distribution(resolved['arrival']),
        task_execution=parse_distribution(resolved['exec']),
        overhead=parse_overhead(resolved.get('overhead')),
        n_jobs=int(resolved['jobs']),
        seed=int(resolved['seed']),
        in_sequence_departures=bool(resolved.get('in_sequence', False)),
        record_tasks=bool(resolved.get('record_tasks', False)),
        warmup_jobs=int(resolved.get('warmup', Config.WARMUP_JOBS))
    )

def add_output_flags(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='JSON run-config file (flags override its values)')
    parser.add_argument('--output', default=None, help=f'output directory (default {Config.OUTPUT_DIR})')

def add_system_flags(parser: argparse.ArgumentParser, jobs_default_note: str = ''):
    parser.add_argument('--model', choices=['sm', 'sqfj', 'fj', 'ideal'])
    parser.add_argument('--l', type=int, help='number of workers')
    parser.add_argument('--k', type=int, help='tasks per job')
    parser.add_argument('--arrival', help='inter-arrival law, e.g. exp:0.5 (rates in 1/s, values in ms)')
    parser.add_argument('--exec', help='task execution law, e.g. exp:2')
    parser.add_argument('--overhead', help='none, paper or c_ts_ms:mu_ts_per_s:c_pd_job_ms:c_pd_task_ms')
    parser.add_argument('--jobs', type=int, help=f'number of jobs{jobs_default_note}')
    parser.add_argument('--seed', type=int, help=f'random seed (default {Config.DEFAULT_SEED})')
    parser.add_argument('--in-sequence', dest='in_sequence', action='store_true', default=None,
                        help='jobs depart in arrival order')
    parser.add_argument('--warmup', type=int, help=f'warm-up jobs excluded from statistics (default {Config.WARMUP_JOBS})')

def require(resolved: Dict[str, Any], keys: Iterable[str]):
    for key in keys:
        if resolved.get(key) is None:
            raise ValidationError(f"{key} is required", field=key)

def finish_run(command: str, store: ArtifactStore, resolved: Dict[str, Any], seed: int) -> RunManifest:
    """Write the run manifest next to the artifacts and log the run end."""
    manifest = RunManifest.build(command, resolved, seed, store.artifacts)
    path = manifest.write(store)
    log_with_context(logger, 'INFO', f'{command} finished', run_id=manifest.run_id, command=command,
                     context={'artifacts': len(store.artifacts), 'manifest': path})
    return manifest

def print_json(data: Dict[str, Any]):
    print(json.dumps(data, sort_keys=True, indent=2, default=str))
