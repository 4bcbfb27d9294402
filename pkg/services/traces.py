"""
Job/task trace datasets: ingestion from CSV, validation and comparison.

Traces use the simulator's export schema, so simulated runs and measured
traces (converted to that schema) are handled alike.
"""
import glob
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union
import numpy as np
import pandas as pd
from config import Config
from services.simulator import JOB_CSV_COLUMNS, TASK_CSV_COLUMNS, JobRecord, SimResult, TaskRecord
from services.stochastic import EmpiricalSample, max_pp_deviation, pp_plot, quantile
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

class SchemaError(ValueError):
    """A trace file lacks required columns."""

    def __init__(self, path: str, missing: Sequence[str]):
        super().__init__(f"{path}: missing columns {', '.join(missing)}")
        self.path = path
        self.missing = list(missing)

@dataclass
class IngestReport:
    source_label: str
    jobs_read: int = 0
    jobs_accepted: int = 0
    tasks_read: int = 0
    tasks_accepted: int = 0
    rejected: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source_label': self.source_label,
            'jobs_read': self.jobs_read,
            'jobs_accepted': self.jobs_accepted,
            'tasks_read': self.tasks_read,
            'tasks_accepted': self.tasks_accepted,
            'rejected': self.rejected
        }

@dataclass
class TraceDataset:
    """Job table (and optional task table) in the export schema, times in ms."""
    jobs: pd.DataFrame
    tasks: Optional[pd.DataFrame]
    source_label: str
    report: Optional[IngestReport] = None

    @classmethod
    def from_result(cls, result: SimResult, source_label: str = 'simulation') -> 'TraceDataset':
        return cls(result.jobs_frame(), result.tasks_frame(), source_label)

    @classmethod
    def concat(cls, datasets: Sequence['TraceDataset'], source_label: Optional[str] = None) -> 'TraceDataset':
        """
        Stack datasets, re-indexing jobs so that indices stay unique.

        Used to fit overhead over traces recorded with different k.
        """
        if not datasets:
            raise ValidationError("no datasets to concatenate", field='datasets')
        job_frames, task_frames = [], []
        offset = 0
        for dataset in datasets:
            jobs = dataset.jobs.copy()
            jobs['job'] = jobs['job'] + offset
            job_frames.append(jobs)
            if dataset.tasks is not None:
                tasks = dataset.tasks.copy()
                tasks['job'] = tasks['job'] + offset
                task_frames.append(tasks)
            offset = int(jobs['job'].max()) if len(jobs) else offset
        label = source_label or '+'.join(d.source_label for d in datasets)
        tasks = pd.concat(task_frames, ignore_index=True) if task_frames else None
        return cls(pd.concat(job_frames, ignore_index=True), tasks, label)

    @property
    def job_records(self) -> List[JobRecord]:
        return [
            JobRecord(int(r.job), r.arrival_ms, r.first_start_ms, r.last_finish_ms, r.departure_ms,
                      r.sojourn_ms, r.waiting_ms, r.workload_ms, r.service_ms)
            for r in self.jobs.itertuples(index=False)
        ]

    @property
    def task_records(self) -> Optional[List[TaskRecord]]:
        if self.tasks is None:
            return None
        return [
            TaskRecord(int(r.job), int(r.task), r.start_ms, r.exec_ms, r.overhead_ms, r.service_ms, r.finish_ms)
            for r in self.tasks.itertuples(index=False)
        ]

    def sojourn_sample(self) -> EmpiricalSample:
        return EmpiricalSample(self.jobs['sojourn_ms'].to_numpy(dtype=float))

def _read_table(path: str, columns: List[str]) -> pd.DataFrame:
    frame = pd.read_csv(path, float_precision='round_trip')
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise SchemaError(path, missing)
    return frame[columns]

def _reject(frame: pd.DataFrame, bad: np.ndarray, reasons: np.ndarray, table: str, report: IngestReport) -> pd.DataFrame:
    for row, reason in zip(np.flatnonzero(bad), reasons[bad]):
        report.rejected.append({'table': table, 'row': int(row) + 1, 'reason': str(reason)})
    return frame[~bad].reset_index(drop=True)

def _validate_jobs(jobs: pd.DataFrame, report: IngestReport) -> pd.DataFrame:
    values = jobs[JOB_CSV_COLUMNS[1:]].to_numpy(dtype=float)
    reasons = np.full(len(jobs), '', dtype=object)
    checks = [
        (np.isnan(values).any(axis=1), 'missing value'),
        (jobs['departure_ms'].to_numpy() < jobs['last_finish_ms'].to_numpy(), 'departure before last finish'),
        (jobs['last_finish_ms'].to_numpy() < jobs['first_start_ms'].to_numpy(), 'last finish before first start'),
        (jobs['first_start_ms'].to_numpy() < jobs['arrival_ms'].to_numpy(), 'first start before arrival')
    ]
    for mask, reason in reversed(checks):
        reasons[mask] = reason
    return _reject(jobs, reasons != '', reasons, 'jobs', report)

def _validate_tasks(tasks: pd.DataFrame, known_jobs: Optional[set], report: IngestReport) -> pd.DataFrame:
    values = tasks[TASK_CSV_COLUMNS[2:]].to_numpy(dtype=float)
    reasons = np.full(len(tasks), '', dtype=object)
    checks = [
        (np.isnan(values).any(axis=1), 'missing value'),
        (tasks['finish_ms'].to_numpy() < tasks['start_ms'].to_numpy(), 'finish before start'),
        ((tasks['exec_ms'].to_numpy() < 0) | (tasks['overhead_ms'].to_numpy() < 0), 'negative duration')
    ]
    if known_jobs is not None:
        checks.append((~tasks['job'].isin(known_jobs).to_numpy(), 'unknown job'))
    for mask, reason in reversed(checks):
        reasons[mask] = reason
    return _reject(tasks, reasons != '', reasons, 'tasks', report)

def _locate(directory: str, suffix: str) -> Optional[str]:
    matches = sorted(glob.glob(os.path.join(directory, f'*{suffix}')))
    if len(matches) > 1:
        raise ValidationError(f"{directory}: several *{suffix} files, pass explicit paths", field='path')
    return matches[0] if matches else None

def ingest_trace(path: str, format: str = 'csv', tasks_path: Optional[str] = None,
                 source_label: Optional[str] = None) -> TraceDataset:
    """
    Read and validate a trace.

    Args:
        path: Directory holding one *jobs.csv (and optionally one *tasks.csv),
            or the jobs CSV itself
        format: Only 'csv' is supported
        tasks_path: Explicit tasks CSV when path is a file
        source_label: Label for reports (defaults to path)

    Returns:
        TraceDataset whose report lists every rejected row with its reason
    """
    if format != 'csv':
        raise ValidationError(f"unsupported trace format: {format}", field='format')

    jobs_path = path
    if os.path.isdir(path):
        jobs_path = _locate(path, 'jobs.csv')
        tasks_path = tasks_path or _locate(path, 'tasks.csv')
        if jobs_path is None:
            raise ValidationError(f"{path}: no *jobs.csv file found", field='path')

    report = IngestReport(source_label=source_label or path)
    jobs = _read_table(jobs_path, JOB_CSV_COLUMNS)
    report.jobs_read = len(jobs)
    jobs = _validate_jobs(jobs, report)
    report.jobs_accepted = len(jobs)

    tasks = None
    if tasks_path:
        tasks = _read_table(tasks_path, TASK_CSV_COLUMNS)
        report.tasks_read = len(tasks)
        tasks = _validate_tasks(tasks, set(jobs['job'].tolist()), report)
        report.tasks_accepted = len(tasks)

    level = 'WARNING' if report.rejected else 'INFO'
    log_with_context(logger, level, f'Ingested trace {report.source_label}',
                     context={'jobs': report.jobs_accepted, 'tasks': report.tasks_accepted,
                              'rejected': len(report.rejected)})
    return TraceDataset(jobs, tasks, report.source_label, report)

@dataclass
class TraceComparison:
    pp_points: List[tuple]
    max_deviation: float
    quantile_deltas: Dict[str, Dict[str, float]]

    def pp_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.pp_points, columns=['p_a', 'p_b'])

    def deltas_frame(self) -> pd.DataFrame:
        rows = [{'quantile': q, **values} for q, values in self.quantile_deltas.items()]
        return pd.DataFrame(rows, columns=['quantile', 'a_ms', 'b_ms', 'delta_ms'])

def _sojourn(source: Union[TraceDataset, SimResult]) -> EmpiricalSample:
    # simulated runs drop their warm-up; measured traces are taken as they are
    return source.sojourn_sample()

def compare_traces(a: Union[TraceDataset, SimResult], b: Union[TraceDataset, SimResult],
                   grid_size: int = Config.PP_GRID_SIZE) -> TraceComparison:
    """PP data of the two sojourn samples and their quantile differences (b − a)."""
    sample_a, sample_b = _sojourn(a), _sojourn(b)
    points = pp_plot(sample_a, sample_b, grid_size)
    deltas = {}
    for q in Config.REPORT_QUANTILES:
        qa, qb = quantile(sample_a, q), quantile(sample_b, q)
        deltas[str(q)] = {'a_ms': qa, 'b_ms': qb, 'delta_ms': qb - qa}
    return TraceComparison(points, max_pp_deviation(points), deltas)
