"""
Simulated and analytical stability regions.

A configuration is checked at a utilization ϱ by re-deriving its arrival law,
simulating and applying the trend-based instability rule of the simulator.
"""
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple
import pandas as pd
from config import Config
from services.envelopes import stability_tiny
from services.erlang import stability_big
from services.simulator import Model, SystemConfig, detect_instability, run
from utils.concurrency import map_in_pool
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

STABILITY_CURVE_COLUMNS = ['k', 'kappa', 'rho_max_sim', 'rho_max_exec', 'rho_max_tiny', 'rho_max_big']
STABILITY_TABLE_COLUMNS = ['l', 'kappa', 'rho_max_tiny', 'rho_max_big']

def is_stable(config: SystemConfig) -> bool:
    stable, diagnostics = detect_instability(run(config))
    log_with_context(logger, 'DEBUG', 'Stability check',
                     context={'utilization': round(config.utilization, 6), 'stable': stable, **diagnostics})
    return stable

def _trial_config(base: SystemConfig, utilization: float, n_jobs: int) -> SystemConfig:
    return replace(base.with_utilization(utilization), n_jobs=n_jobs, record_tasks=False)

def isotonic_cleanup(flags: Sequence[bool]) -> List[bool]:
    """
    Closest stable-prefix / unstable-suffix classification.

    Picks the cut that disagrees with the fewest raw flags (the lowest cut on ties).
    """
    n = len(flags)
    best_cut, best_cost = 0, None
    for cut in range(n + 1):
        cost = sum(1 for f in flags[:cut] if not f) + sum(1 for f in flags[cut:] if f)
        if best_cost is None or cost < best_cost:
            best_cut, best_cost = cut, cost
    return [index < best_cut for index in range(n)]

def stability_scan(base: SystemConfig, utilization_grid: Sequence[float],
                   n_jobs: int = Config.STABILITY_JOBS, threads: int = 1) -> List[Tuple[float, bool]]:
    """
    Classify each grid utilization as stable or unstable.

    Returns:
        (utilization, stable) pairs in ascending utilization, monotone after cleanup
    """
    if not utilization_grid:
        raise ValidationError("utilization grid is empty", field='utilization_grid')
    grid = sorted(float(u) for u in utilization_grid)
    raw = map_in_pool(is_stable, [_trial_config(base, u, n_jobs) for u in grid], threads)
    cleaned = isotonic_cleanup(raw)
    if cleaned != raw:
        log_with_context(logger, 'INFO', 'Stability flags made monotone',
                         context={'raw': raw, 'cleaned': cleaned})
    return list(zip(grid, cleaned))

def max_stable_utilization(base: SystemConfig,
                           bracket: Tuple[float, float] = Config.STABILITY_BRACKET,
                           resolution: float = Config.STABILITY_RESOLUTION,
                           n_jobs: int = Config.STABILITY_JOBS) -> float:
    """Bisection on ϱ for the largest utilization classified stable."""
    lower, upper = bracket
    if not is_stable(_trial_config(base, lower, n_jobs)):
        return lower
    if is_stable(_trial_config(base, upper, n_jobs)):
        return upper
    while upper - lower > resolution:
        middle = 0.5 * (lower + upper)
        if is_stable(_trial_config(base, middle, n_jobs)):
            lower = middle
        else:
            upper = middle
    return lower

def _analytical(model: Model, l: int, kappa: float, zero_overhead: bool) -> Tuple[Optional[float], Optional[float]]:
    if model is not Model.SPLIT_MERGE or not zero_overhead:
        return None, None
    big = stability_big(l, int(kappa)) if kappa == int(kappa) else None
    return stability_tiny(l, kappa), big

def _curve_row(item: Tuple[SystemConfig, Tuple[float, float], float, int]) -> dict:
    config, bracket, resolution, n_jobs = item
    rho_sim = max_stable_utilization(config, bracket, resolution, n_jobs)
    rho_tiny, rho_big = _analytical(config.model, config.l, config.kappa, config.overhead.is_zero)
    log_with_context(logger, 'INFO', f'Stability region point k={config.k}',
                     context={'rho_max_sim': rho_sim, 'rho_max_tiny': rho_tiny})
    rho_exec = rho_sim * config.task_execution.mean() / config.mean_task_service
    return {'k': config.k, 'kappa': config.kappa, 'rho_max_sim': rho_sim, 'rho_max_exec': rho_exec,
            'rho_max_tiny': rho_tiny, 'rho_max_big': rho_big}

def stability_region_curve(base: SystemConfig, k_values: Sequence[int],
                           bracket: Tuple[float, float] = Config.STABILITY_BRACKET,
                           resolution: float = Config.STABILITY_RESOLUTION,
                           n_jobs: int = Config.STABILITY_JOBS, threads: int = 1) -> pd.DataFrame:
    """
    Simulated maximum stable utilization per k, with the analytical split-merge
    values where they apply (zero overhead; the big-tasks value for integer κ).
    rho_max_exec is the simulated limit as execution-only load λ·κ·E[E_i].

    The job execution workload k·E[E_i] is held constant across k.
    """
    if not k_values:
        raise ValidationError("k list is empty", field='k_values')
    configs = [base.rescale_for_k(k) for k in k_values]
    rows = map_in_pool(_curve_row, [(c, bracket, resolution, n_jobs) for c in configs], threads)
    return pd.DataFrame(rows, columns=STABILITY_CURVE_COLUMNS)

def stability_formula_table(l_values: Sequence[int], kappa_values: Sequence[int]) -> pd.DataFrame:
    """Analytical split-merge stability for tiny tasks (κl exponential tasks) and big tasks (l Erlang-κ tasks)."""
    rows = [
        {'l': l, 'kappa': kappa, 'rho_max_tiny': stability_tiny(l, kappa), 'rho_max_big': stability_big(l, kappa)}
        for l in l_values
        for kappa in kappa_values
    ]
    return pd.DataFrame(rows, columns=STABILITY_TABLE_COLUMNS)
