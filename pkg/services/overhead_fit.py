"""
Fit of the scheduling overhead model to task and job traces.

Task-service overhead O_i = service − execution is modelled as a constant plus
an exponential; pre-departure delay D − last finish as a linear function of k.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union
import numpy as np
import pandas as pd
from services.overhead import OverheadParams
from services.stochastic import EmpiricalSample, boxplot_summary, quantile
from services.traces import TraceDataset
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

CONSTANT_QUANTILE = 0.01

@dataclass
class OverheadFit:
    c_ts_task: float
    mu_ts_task: float
    c_pd_job: float
    c_pd_task: float
    residual_stats: Dict[str, Dict[str, float]] = field(default_factory=dict)
    single_k: bool = False
    n_tasks: int = 0
    n_jobs: int = 0

    @property
    def mean_task_overhead(self) -> float:
        return self.c_ts_task + (1.0 / self.mu_ts_task if self.mu_ts_task > 0 else 0.0)

    def to_overhead_params(self) -> OverheadParams:
        return OverheadParams(self.c_ts_task, self.mu_ts_task, self.c_pd_job, self.c_pd_task)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'c_ts_task': self.c_ts_task,
            'mu_ts_task': self.mu_ts_task,
            'c_pd_job': self.c_pd_job,
            'c_pd_task': self.c_pd_task,
            'residual_stats': self.residual_stats,
            'single_k_warning': self.single_k,
            'n_tasks': self.n_tasks,
            'n_jobs': self.n_jobs
        }

def fit_task_overhead(overheads: np.ndarray) -> tuple:
    """(c, μ): c is the 1st percentile, μ = 1/mean(O − c), 0 when that mean is not positive."""
    sample = EmpiricalSample(overheads)
    constant = max(0.0, quantile(sample, CONSTANT_QUANTILE))
    excess = float(np.mean(sample.values - constant))
    return constant, (1.0 / excess if excess > 0 else 0.0)

def fit_pre_departure(k: np.ndarray, delay: np.ndarray) -> tuple:
    """
    Least-squares intercept and slope of delay against k.

    Returns:
        Tuple of (intercept, slope, single_k); a single distinct k leaves the
        slope undetermined and it is returned as 0
    """
    if np.unique(k).size < 2:
        return float(np.mean(delay)), 0.0, True
    design = np.column_stack([np.ones_like(k, dtype=float), k.astype(float)])
    (intercept, slope), *_ = np.linalg.lstsq(design, delay, rcond=None)
    return float(intercept), float(slope), False

def fit_overhead(tasks: Union[pd.DataFrame, TraceDataset], jobs: Optional[pd.DataFrame] = None) -> OverheadFit:
    """
    Fit the four overhead parameters.

    Args:
        tasks: Task table (export schema) or a TraceDataset holding both tables
        jobs: Job table (export schema) when tasks is a frame

    Returns:
        OverheadFit with nonnegative parameters
    """
    if isinstance(tasks, TraceDataset):
        tasks, jobs = tasks.tasks, tasks.jobs
    if tasks is None or jobs is None or len(tasks) == 0 or len(jobs) == 0:
        raise ValidationError("overhead fit needs non-empty task and job tables", field='trace')
    if 'overhead_ms' not in tasks.columns:
        raise ValidationError("task table has no overhead_ms column", field='overhead_ms')

    overheads = tasks['overhead_ms'].to_numpy(dtype=float)
    c_ts, mu_ts = fit_task_overhead(overheads)

    k_per_job = tasks.groupby('job').size()
    jobs = jobs[jobs['job'].isin(k_per_job.index)]
    if len(jobs) == 0:
        raise ValidationError("no job in the trace has recorded tasks", field='trace')
    k = k_per_job.loc[jobs['job']].to_numpy()
    delay = (jobs['departure_ms'] - jobs['last_finish_ms']).to_numpy(dtype=float)
    c_pd_job, c_pd_task, single_k = fit_pre_departure(k, delay)

    if single_k:
        log_with_context(logger, 'WARNING', 'Trace has a single k; per-task pre-departure slope set to 0',
                         context={'k': int(k[0])})

    residuals = delay - (c_pd_job + c_pd_task * k)
    fit = OverheadFit(
        c_ts_task=c_ts,
        mu_ts_task=mu_ts,
        c_pd_job=max(0.0, c_pd_job),
        c_pd_task=max(0.0, c_pd_task),
        residual_stats={
            'task_overhead': boxplot_summary(EmpiricalSample(overheads)),
            'pre_departure_residual': boxplot_summary(EmpiricalSample(residuals))
        },
        single_k=single_k,
        n_tasks=len(tasks),
        n_jobs=len(jobs)
    )
    log_with_context(logger, 'INFO', 'Overhead model fitted',
                     context={'c_ts_task': fit.c_ts_task, 'mu_ts_task': fit.mu_ts_task,
                              'c_pd_job': fit.c_pd_job, 'c_pd_task': fit.c_pd_task})
    return fit
