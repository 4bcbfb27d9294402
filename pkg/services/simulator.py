"""
Event-driven simulation of parallel systems with tiny tasks.

Models: split-merge, single-queue fork-join, conventional fork-join and the
ideal job partition, each with the calibrated task-service and pre-departure
overhead model. Tasks are dispatched in FIFO order (job, then task index) to
the earliest-free worker; the event loop therefore reduces to a heap of
worker-free events per model.
"""
import heapq
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple
import numpy as np
import pandas as pd
from config import Config
from services.overhead import OverheadParams
from services.stochastic import Distribution, EmpiricalSample, RngStream, quantile
from utils.logger import logger, log_with_context
from utils.validators import ValidationError, validate_system_config

# Stream ids: every variate class has its own stream so that the execution
# draw of (job n, task i) does not depend on the model or on overhead settings.
ARRIVAL_STREAM = 0
EXECUTION_STREAM = 1
OVERHEAD_STREAM = 2

JOB_CSV_COLUMNS = ['job', 'arrival_ms', 'first_start_ms', 'last_finish_ms', 'departure_ms',
                   'sojourn_ms', 'waiting_ms', 'workload_ms', 'service_ms']
TASK_CSV_COLUMNS = ['job', 'task', 'start_ms', 'exec_ms', 'overhead_ms', 'service_ms', 'finish_ms']

class Model(str, Enum):
    SPLIT_MERGE = 'sm'
    SINGLE_QUEUE_FORK_JOIN = 'sqfj'
    CONVENTIONAL_FORK_JOIN = 'fj'
    IDEAL_PARTITION = 'ideal'

@dataclass(frozen=True)
class SystemConfig:
    """Parallel system under simulation (times in ms)."""
    model: Model
    l: int
    k: int
    arrival: Distribution
    task_execution: Distribution
    overhead: OverheadParams = OverheadParams()
    n_jobs: int = Config.DEFAULT_JOBS
    seed: int = Config.DEFAULT_SEED
    in_sequence_departures: bool = False
    record_tasks: bool = False
    warmup_jobs: int = Config.WARMUP_JOBS

    def __post_init__(self):
        try:
            object.__setattr__(self, 'model', Model(self.model))
        except ValueError:
            raise ValidationError(f"unknown model: {self.model}", field='model')
        is_valid, error, field_name = validate_system_config(self)
        if not is_valid:
            raise ValidationError(error, field=field_name)

    @property
    def kappa(self) -> float:
        """Factor of tinyfication k/l."""
        return self.k / self.l

    @property
    def mean_task_service(self) -> float:
        """E[Q_i] = E[E_i] + E[O_i]."""
        return self.task_execution.mean() + self.overhead.mean_task_overhead

    @property
    def utilization(self) -> float:
        """ϱ = λ·κ·E[Q_i]."""
        return self.kappa * self.mean_task_service / self.arrival.mean()

    def with_utilization(self, utilization: float) -> 'SystemConfig':
        """Re-derive the arrival law (same family) so that ϱ = utilization."""
        if utilization <= 0:
            raise ValidationError("utilization must be > 0", field='utilization')
        return replace(self, arrival=self.arrival.with_mean(self.kappa * self.mean_task_service / utilization))

    def rescale_for_k(self, k: int) -> 'SystemConfig':
        """
        Change k keeping the expected job execution workload k·E[E_i] constant.

        Conventional fork-join keeps one task per server, so l follows k.
        """
        workload = self.k * self.task_execution.mean()
        l = k if self.model is Model.CONVENTIONAL_FORK_JOIN else self.l
        return replace(self, l=l, k=k, task_execution=self.task_execution.with_mean(workload / k))

    def vary(self, name: str, value: float, pin_mu: bool = False) -> 'SystemConfig':
        """
        Apply one sweep variation.

        k: constant expected workload unless pin_mu (then the task law is kept);
        lambda: arrival rate (1/ms), same family; l: worker count (conventional
        fork-join keeps k = l at constant workload).
        """
        if name == 'k':
            k = int(value)
            if pin_mu:
                l = k if self.model is Model.CONVENTIONAL_FORK_JOIN else self.l
                return replace(self, l=l, k=k)
            return self.rescale_for_k(k)
        if name == 'lambda':
            if value <= 0:
                raise ValidationError("lambda must be > 0", field='lambda')
            return replace(self, arrival=self.arrival.with_mean(1.0 / value))
        if name == 'l':
            l = int(value)
            if self.model is Model.CONVENTIONAL_FORK_JOIN:
                return replace(self, l=l, k=l) if pin_mu else self.rescale_for_k(l)
            return replace(self, l=l)
        raise ValidationError(f"cannot vary '{name}' (expected k, lambda or l)", field='vary')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'model': self.model.value,
            'l': self.l,
            'k': self.k,
            'arrival': self.arrival.to_dict(),
            'task_execution': self.task_execution.to_dict(),
            'overhead': self.overhead.to_dict(),
            'n_jobs': self.n_jobs,
            'seed': self.seed,
            'in_sequence_departures': self.in_sequence_departures,
            'record_tasks': self.record_tasks,
            'warmup_jobs': self.warmup_jobs
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SystemConfig':
        data = dict(data)
        data['arrival'] = Distribution.from_dict(data['arrival'])
        data['task_execution'] = Distribution.from_dict(data['task_execution'])
        data['overhead'] = OverheadParams.from_dict(data.get('overhead', {}))
        return cls(**data)

@dataclass
class TaskRecord:
    job_index: int
    task_index: int
    start: float
    execution: float
    overhead: float
    service: float
    finish: float

@dataclass
class JobRecord:
    index: int
    arrival: float
    first_start: float
    last_task_finish: float
    departure: float
    sojourn: float
    waiting: float
    workload: float
    job_service: float

@dataclass
class SimResult:
    """
    Outcome of one run, held column-wise.

    job_table columns: arrival, first_start, last_finish, departure, workload.
    task_table columns: job, task, start, execution, overhead, service, finish.
    """
    config: SystemConfig
    job_table: Dict[str, np.ndarray]
    task_table: Optional[Dict[str, np.ndarray]] = None

    @property
    def n_jobs(self) -> int:
        return int(self.job_table['arrival'].size)

    @property
    def arrival(self) -> np.ndarray:
        return self.job_table['arrival']

    @property
    def departure(self) -> np.ndarray:
        return self.job_table['departure']

    @property
    def sojourn(self) -> np.ndarray:
        return self.job_table['departure'] - self.job_table['arrival']

    @property
    def waiting(self) -> np.ndarray:
        return self.job_table['first_start'] - self.job_table['arrival']

    @property
    def job_service(self) -> np.ndarray:
        return self.job_table['last_finish'] - self.job_table['first_start']

    @property
    def workload(self) -> np.ndarray:
        return self.job_table['workload']

    @property
    def jobs(self) -> List[JobRecord]:
        table = self.job_table
        sojourn, waiting, job_service = self.sojourn, self.waiting, self.job_service
        return [
            JobRecord(
                index=n + 1,
                arrival=float(table['arrival'][n]),
                first_start=float(table['first_start'][n]),
                last_task_finish=float(table['last_finish'][n]),
                departure=float(table['departure'][n]),
                sojourn=float(sojourn[n]),
                waiting=float(waiting[n]),
                workload=float(table['workload'][n]),
                job_service=float(job_service[n])
            )
            for n in range(self.n_jobs)
        ]

    @property
    def tasks(self) -> Optional[List[TaskRecord]]:
        if self.task_table is None:
            return None
        t = self.task_table
        return [
            TaskRecord(int(t['job'][i]), int(t['task'][i]), float(t['start'][i]), float(t['execution'][i]),
                       float(t['overhead'][i]), float(t['service'][i]), float(t['finish'][i]))
            for i in range(t['job'].size)
        ]

    def effective_warmup(self, warmup: Optional[int] = None) -> int:
        """Warm-up jobs to skip; runs not longer than the warm-up keep all jobs."""
        warmup = self.config.warmup_jobs if warmup is None else warmup
        return warmup if warmup < self.n_jobs else 0

    def sojourn_sample(self, warmup: Optional[int] = None) -> EmpiricalSample:
        return EmpiricalSample(self.sojourn[self.effective_warmup(warmup):])

    def waiting_sample(self, warmup: Optional[int] = None) -> EmpiricalSample:
        return EmpiricalSample(self.waiting[self.effective_warmup(warmup):])

    def summary(self) -> Dict[str, Any]:
        """JSON summary: config, sojourn quantiles, means and the stability verdict."""
        sojourn = self.sojourn_sample()
        waiting = self.waiting_sample()
        stable, diagnostics = detect_instability(self)
        return {
            'config': self.config.to_dict(),
            'quantiles': {str(q): quantile(sojourn, q) for q in Config.REPORT_QUANTILES},
            'mean_sojourn': sojourn.mean(),
            'mean_waiting': waiting.mean(),
            'mean_job_service': float(self.job_service[self.effective_warmup():].mean()),
            'stable': stable,
            'stability_diagnostics': diagnostics
        }

    def jobs_frame(self) -> pd.DataFrame:
        t = self.job_table
        return pd.DataFrame({
            'job': np.arange(1, self.n_jobs + 1),
            'arrival_ms': t['arrival'],
            'first_start_ms': t['first_start'],
            'last_finish_ms': t['last_finish'],
            'departure_ms': t['departure'],
            'sojourn_ms': self.sojourn,
            'waiting_ms': self.waiting,
            'workload_ms': t['workload'],
            'service_ms': self.job_service
        }, columns=JOB_CSV_COLUMNS)

    def tasks_frame(self) -> Optional[pd.DataFrame]:
        if self.task_table is None:
            return None
        t = self.task_table
        return pd.DataFrame({
            'job': t['job'],
            'task': t['task'],
            'start_ms': t['start'],
            'exec_ms': t['execution'],
            'overhead_ms': t['overhead'],
            'service_ms': t['service'],
            'finish_ms': t['finish']
        }, columns=TASK_CSV_COLUMNS)

class _TaskLog:
    """Accumulates per-task columns when task recording is enabled."""

    def __init__(self):
        self.job: List[int] = []
        self.task: List[int] = []
        self.start: List[float] = []
        self.execution: List[float] = []
        self.overhead: List[float] = []
        self.service: List[float] = []
        self.finish: List[float] = []

    def add_job(self, job: int, starts, executions, overheads, services, finishes):
        count = len(starts)
        self.job.extend([job] * count)
        self.task.extend(range(1, count + 1))
        self.start.extend(starts)
        self.execution.extend(executions)
        self.overhead.extend(overheads)
        self.service.extend(services)
        self.finish.extend(finishes)

    def table(self) -> Dict[str, np.ndarray]:
        return {
            'job': np.asarray(self.job, dtype=np.int64),
            'task': np.asarray(self.task, dtype=np.int64),
            'start': np.asarray(self.start, dtype=float),
            'execution': np.asarray(self.execution, dtype=float),
            'overhead': np.asarray(self.overhead, dtype=float),
            'service': np.asarray(self.service, dtype=float),
            'finish': np.asarray(self.finish, dtype=float)
        }

class ParallelSystemSimulator:
    """Runs one SystemConfig as a single sequential, deterministic event loop."""

    def __init__(self, config: SystemConfig):
        self.config = config
        self.pre_departure = config.overhead.pre_departure(config.k)
        # model state
        self._workers: List[float] = [0.0] * config.l
        self._server_free = np.zeros(config.l)
        self._last_departure = 0.0
        self._last_ready = 0.0

    def run(self) -> SimResult:
        cfg = self.config
        n, k = cfg.n_jobs, cfg.k
        log_with_context(logger, 'INFO', f'Simulating {n} jobs ({cfg.model.value}, l={cfg.l}, k={k})',
                         context={'seed': cfg.seed, 'utilization': round(cfg.utilization, 6)})
        if cfg.warmup_jobs >= n:
            log_with_context(logger, 'WARNING', 'Warm-up covers every job; statistics use all jobs',
                             context={'warmup_jobs': cfg.warmup_jobs, 'jobs': n})

        arrivals = self._arrival_times()
        first_start = np.empty(n)
        last_finish = np.empty(n)
        departure = np.empty(n)
        workload = np.empty(n)
        task_log = _TaskLog() if cfg.record_tasks else None

        dispatch = {
            Model.SPLIT_MERGE: self._split_merge_job,
            Model.SINGLE_QUEUE_FORK_JOIN: self._single_queue_job,
            Model.CONVENTIONAL_FORK_JOIN: self._fork_join_job,
            Model.IDEAL_PARTITION: self._ideal_partition_job
        }[cfg.model]

        execution_stream = RngStream(cfg.seed, EXECUTION_STREAM)
        overhead_stream = RngStream(cfg.seed, OVERHEAD_STREAM)

        for chunk_start in range(0, n, Config.SIM_CHUNK_JOBS):
            m = min(Config.SIM_CHUNK_JOBS, n - chunk_start)
            execution = np.asarray(cfg.task_execution.sample(execution_stream, (m, k)), dtype=float)
            overhead = self._task_overheads(overhead_stream, (m, k))
            service = execution + overhead

            for j in range(m):
                index = chunk_start + j
                row = service[j]
                starts, finishes, first, last, ready = dispatch(float(arrivals[index]), row)
                first_start[index] = first
                last_finish[index] = last
                departure[index] = ready + self.pre_departure
                if cfg.model is Model.IDEAL_PARTITION:
                    workload[index] = math.fsum([row.sum() / cfg.l] * cfg.l)
                else:
                    workload[index] = math.fsum(row.tolist())
                if task_log is not None:
                    self._log_tasks(task_log, index + 1, starts, finishes, execution[j], overhead[j], row)

        result = SimResult(
            config=cfg,
            job_table={
                'arrival': arrivals,
                'first_start': first_start,
                'last_finish': last_finish,
                'departure': departure,
                'workload': workload
            },
            task_table=task_log.table() if task_log is not None else None
        )
        log_with_context(logger, 'INFO', 'Simulation finished',
                         context={'mean_sojourn': float(result.sojourn.mean()), 'jobs': n})
        return result

    def _arrival_times(self) -> np.ndarray:
        cfg = self.config
        gaps = np.asarray(cfg.arrival.sample(RngStream(cfg.seed, ARRIVAL_STREAM), cfg.n_jobs), dtype=float)
        arrivals = np.empty(cfg.n_jobs)
        arrivals[0] = 0.0
        np.cumsum(gaps[:-1], out=arrivals[1:])
        return arrivals

    def _task_overheads(self, stream: RngStream, shape: Tuple[int, int]) -> np.ndarray:
        overhead = self.config.overhead
        if overhead.mu_ts_task > 0:
            return overhead.c_ts_task + stream.generator.exponential(1.0 / overhead.mu_ts_task, shape)
        return np.full(shape, overhead.c_ts_task)

    def _dispatch_fifo(self, workers: List[float], ready: float, services, record: bool):
        """Assign tasks in order to the earliest-free worker; returns starts, finishes, first, last."""
        starts = [] if record else None
        finishes = [] if record else None
        first = None
        last = ready
        for q in services:
            free = workers[0]
            start = free if free > ready else ready
            finish = start + q
            heapq.heapreplace(workers, finish)
            if first is None:
                first = start
            if finish > last:
                last = finish
            if record:
                starts.append(start)
                finishes.append(finish)
        return starts, finishes, first, last

    def _split_merge_job(self, arrival: float, row: np.ndarray):
        # the job splits only once its predecessor has departed (blocking pre-departure)
        start = arrival if arrival > self._last_departure else self._last_departure
        workers = [start] * min(self.config.l, self.config.k)
        starts, finishes, first, last = self._dispatch_fifo(workers, start, row.tolist(), self.config.record_tasks)
        self._last_departure = last + self.pre_departure
        return starts, finishes, first, last, last

    def _single_queue_job(self, arrival: float, row: np.ndarray):
        starts, finishes, first, last = self._dispatch_fifo(self._workers, arrival, row.tolist(),
                                                            self.config.record_tasks)
        ready = last
        if self.config.in_sequence_departures and self._last_ready > ready:
            ready = self._last_ready
        self._last_ready = ready
        return starts, finishes, first, last, ready

    def _fork_join_job(self, arrival: float, row: np.ndarray):
        starts = np.maximum(self._server_free, arrival)
        finishes = starts + row
        self._server_free = finishes
        first = float(starts.min())
        last = float(finishes.max())
        ready = last
        if self.config.in_sequence_departures and self._last_ready > ready:
            ready = self._last_ready
        self._last_ready = ready
        if self.config.record_tasks:
            return starts.tolist(), finishes.tolist(), first, last, ready
        return None, None, first, last, ready

    def _ideal_partition_job(self, arrival: float, row: np.ndarray):
        # l equal tasks run in unison: a single server with service L(n)/l
        start = arrival if arrival > self._last_ready else self._last_ready
        finish = start + row.sum() / self.config.l
        self._last_ready = finish
        if self.config.record_tasks:
            return [start] * self.config.l, [finish] * self.config.l, start, finish, finish
        return None, None, start, finish, finish

    def _log_tasks(self, task_log: _TaskLog, job: int, starts, finishes, execution, overhead, row):
        if self.config.model is Model.IDEAL_PARTITION:
            l = self.config.l
            service = row.sum() / l
            exec_share = min(execution.sum() / l, service)
            task_log.add_job(job, starts, [exec_share] * l, [service - exec_share] * l,
                             [service] * l, finishes)
            return
        task_log.add_job(job, starts, execution.tolist(), overhead.tolist(), row.tolist(), finishes)

def run(config: SystemConfig) -> SimResult:
    """Simulate config; bitwise reproducible for a fixed config."""
    return ParallelSystemSimulator(config).run()

def detect_instability(result: SimResult,
                       growth_factor: float = Config.STABILITY_GROWTH_FACTOR,
                       queue_factor: int = Config.STABILITY_QUEUE_FACTOR,
                       drift_fraction: float = Config.STABILITY_DRIFT_FRACTION) -> Tuple[bool, Dict[str, float]]:
    """
    Trend-based instability detection on the waiting-time sample path.

    Unstable when the last-decile mean waiting time exceeds growth_factor times
    the fourth-decile mean (floored at the mean task service time) while the
    least-squares slope of the waiting times over the second half of the run
    exceeds drift_fraction mean inter-arrival times per job, or when more than
    queue_factor·l jobs are still in the system at the last arrival.

    Returns:
        Tuple of (stable, diagnostics)
    """
    cfg = result.config
    waiting = result.waiting
    in_system = int(np.sum(result.departure > result.arrival[-1]))
    diagnostics = {'jobs_in_system': in_system}

    growing = False
    if waiting.size >= 10:
        deciles = np.array_split(waiting, 10)
        fourth = float(deciles[3].mean())
        last = float(deciles[9].mean())
        diagnostics.update({'fourth_decile_waiting': fourth, 'last_decile_waiting': last})
        second_half = waiting[waiting.size // 2:]
        drift = float(np.polyfit(np.arange(second_half.size, dtype=float), second_half, 1)[0])
        diagnostics['waiting_drift'] = drift
        growing = (last > growth_factor * max(fourth, cfg.mean_task_service)
                   and drift > drift_fraction * cfg.arrival.mean())

    stable = not (growing or in_system > queue_factor * cfg.l)
    return stable, diagnostics

def residual_gaps(result: SimResult) -> np.ndarray:
    """
    Gaps Z_i(n) between consecutive task starts of tasks i ≥ l within each
    split-merge job (time from a task start until the next worker frees up).
    """
    cfg = result.config
    if cfg.model is not Model.SPLIT_MERGE or result.task_table is None:
        raise ValueError("residual gaps need a split-merge run with recorded tasks")
    starts = result.task_table['start'].reshape(result.n_jobs, cfg.k)
    return np.diff(starts[:, cfg.l - 1:], axis=1).ravel()
