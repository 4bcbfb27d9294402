"""
Parameter sweeps comparing simulation against the analytical bounds.

Each row runs through the sweep-row workflow; rows are independent and fan
out over a process pool bounded by the thread count.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence
import pandas as pd
from agent.workflow import process_row
from services.simulator import SystemConfig
from utils.concurrency import map_in_pool
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

BOUND_CSV_COLUMNS = ['k', 'epsilon', 'theta_star', 'tau_ms', 'feasible']

@dataclass(frozen=True)
class SweepSpec:
    """
    One-parameter sweep around a base configuration.

    vary: k, lambda (1/ms) or l. Varying k keeps the expected job workload
    constant (μ = k/(l·workload)) unless pin_mu is set.
    """
    base: SystemConfig
    vary: str
    values: Sequence[float]
    epsilon_list: Sequence[float] = (1e-2,)
    compare_analytical: bool = True
    simulate: bool = True
    pin_mu: bool = False
    threads: int = 1

    def __post_init__(self):
        if not self.values:
            raise ValidationError("sweep values must not be empty", field='values')
        if self.vary not in ('k', 'lambda', 'l'):
            raise ValidationError(f"cannot vary '{self.vary}' (expected k, lambda or l)", field='vary')
        if not self.simulate and not self.compare_analytical:
            raise ValidationError("sweep computes nothing: enable simulation or analytical comparison",
                                  field='simulate')

    def row_inputs(self) -> List[Dict[str, Any]]:
        options = {
            'epsilon_list': list(self.epsilon_list),
            'compare_analytical': self.compare_analytical,
            'simulate': self.simulate,
            'pin_mu': self.pin_mu
        }
        return [
            {'row_id': f'{self.vary}={value:g}', 'vary': self.vary, 'value': value, 'base': self.base,
             'options': options}
            for value in self.values
        ]

@dataclass
class SweepResult:
    rows: pd.DataFrame
    bounds: pd.DataFrame
    failed: List[str] = field(default_factory=list)

def run_sweep(spec: SweepSpec) -> SweepResult:
    """
    Evaluate every row; a failing row is marked failed and the sweep goes on.

    Returns:
        SweepResult with one table row per value (input order) and the bound rows
    """
    log_with_context(logger, 'INFO', f'Sweep over {spec.vary}: {len(spec.values)} rows',
                     context={'model': spec.base.model.value, 'threads': spec.threads})
    outputs = map_in_pool(process_row, spec.row_inputs(), spec.threads)

    rows = [output['result'] for output in outputs]
    bounds = [bound for output in outputs for bound in output['bound_rows']]
    failed = [output['row_id'] for output in outputs if output['status'] != 'completed']
    if failed:
        log_with_context(logger, 'WARNING', f'{len(failed)} sweep rows failed', context={'rows': failed})

    return SweepResult(pd.DataFrame(rows), pd.DataFrame(bounds, columns=BOUND_CSV_COLUMNS), failed)
