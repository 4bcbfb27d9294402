"""
Scheduling overhead model shared by the simulator and the envelope calculus.
"""
from dataclasses import dataclass, asdict
from typing import Dict
from config import Config
from utils.validators import ValidationError, validate_overhead

@dataclass(frozen=True)
class OverheadParams:
    """
    Scheduling overhead model (times in ms, rates in 1/ms).

    Task-service overhead c_ts_task + Exp(mu_ts_task) blocks the worker;
    pre-departure overhead c_pd_job + k·c_pd_task delays the job departure.
    mu_ts_task = 0 disables the exponential component.
    """
    c_ts_task: float = 0.0
    mu_ts_task: float = 0.0
    c_pd_job: float = 0.0
    c_pd_task: float = 0.0

    def __post_init__(self):
        is_valid, error = validate_overhead(self.c_ts_task, self.mu_ts_task, self.c_pd_job, self.c_pd_task)
        if not is_valid:
            raise ValidationError(error, field='overhead')

    @classmethod
    def measured(cls) -> 'OverheadParams':
        """Values measured on the Spark cluster (2.6 ms, 2000 s⁻¹, 20 ms, 7.4e-3 ms)."""
        return cls(
            c_ts_task=Config.MEASURED_C_TS_TASK_MS,
            mu_ts_task=Config.MEASURED_MU_TS_TASK_PER_S / 1000.0,
            c_pd_job=Config.MEASURED_C_PD_JOB_MS,
            c_pd_task=Config.MEASURED_C_PD_TASK_MS
        )

    @property
    def is_zero(self) -> bool:
        return self.c_ts_task == 0 and self.mu_ts_task == 0 and self.c_pd_job == 0 and self.c_pd_task == 0

    @property
    def mean_task_overhead(self) -> float:
        """E[O_i(n)] = c_ts_task + 1/mu_ts_task."""
        return self.c_ts_task + (1.0 / self.mu_ts_task if self.mu_ts_task > 0 else 0.0)

    def pre_departure(self, k: int) -> float:
        return self.c_pd_job + k * self.c_pd_task

    def scaled(self, time_factor: float) -> 'OverheadParams':
        """Change time unit: durations are multiplied, rates divided (1e-3: ms → s)."""
        return OverheadParams(
            c_ts_task=self.c_ts_task * time_factor,
            mu_ts_task=self.mu_ts_task / time_factor,
            c_pd_job=self.c_pd_job * time_factor,
            c_pd_task=self.c_pd_task * time_factor
        )

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> 'OverheadParams':
        return cls(**data)
