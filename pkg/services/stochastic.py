"""
Random variates, empirical statistics and distribution primitives.

Shared by the simulator (variate generation) and the experiment layer
(quantiles, PP plots, box-plot summaries of sojourn and overhead samples).
"""
import math
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import numpy as np
import pandas as pd
from config import Config
from utils.validators import ValidationError, validate_distribution

class EmptySampleError(ValueError):
    """Raised when a statistic is requested from an empty sample."""

    def __init__(self, message: str = 'empty sample'):
        super().__init__(message)

class DistributionKind(str, Enum):
    EXPONENTIAL = 'exp'
    ERLANG = 'erlang'
    DETERMINISTIC = 'det'
    SHIFTED_EXPONENTIAL = 'sexp'

@dataclass(frozen=True)
class Distribution:
    """
    Parametric law of a nonnegative duration.

    Rates are in 1/time and values in time, both in the caller's time unit
    (the simulator works in milliseconds).
    """
    kind: DistributionKind
    rate: float = 0.0
    shape: int = 1
    value: float = 0.0
    shift: float = 0.0

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', DistributionKind(self.kind))
        except ValueError:
            raise ValidationError(f"unknown distribution kind: {self.kind}", field='distribution')
        is_valid, error = validate_distribution(self.kind.value, self.rate, self.shape, self.value, self.shift)
        if not is_valid:
            raise ValidationError(error, field='distribution')

    @classmethod
    def exponential(cls, rate: float) -> 'Distribution':
        return cls(DistributionKind.EXPONENTIAL, rate=float(rate))

    @classmethod
    def erlang(cls, shape: int, rate: float) -> 'Distribution':
        return cls(DistributionKind.ERLANG, rate=float(rate), shape=shape)

    @classmethod
    def deterministic(cls, value: float) -> 'Distribution':
        return cls(DistributionKind.DETERMINISTIC, value=float(value))

    @classmethod
    def shifted_exponential(cls, shift: float, rate: float) -> 'Distribution':
        return cls(DistributionKind.SHIFTED_EXPONENTIAL, rate=float(rate), shift=float(shift))

    @classmethod
    def from_flag(cls, text: str, rate_scale: float = 1.0) -> 'Distribution':
        """
        Parse the compact flag grammar.

        Args:
            text: exp:<rate>, erlang:<shape>:<rate>, det:<value> or sexp:<shift>:<rate>
            rate_scale: Factor applied to rates (1e-3 converts s⁻¹ to ms⁻¹)

        Returns:
            Distribution
        """
        parts = text.strip().split(':')
        kind = parts[0].lower()
        try:
            if kind == 'exp' and len(parts) == 2:
                return cls.exponential(float(parts[1]) * rate_scale)
            if kind == 'erlang' and len(parts) == 3:
                return cls.erlang(int(parts[1]), float(parts[2]) * rate_scale)
            if kind == 'det' and len(parts) == 2:
                return cls.deterministic(float(parts[1]))
            if kind == 'sexp' and len(parts) == 3:
                return cls.shifted_exponential(float(parts[1]), float(parts[2]) * rate_scale)
        except ValueError as e:
            raise ValidationError(f"malformed distribution '{text}': {e}", field='distribution')
        raise ValidationError(
            f"malformed distribution '{text}' (expected exp:<rate>, erlang:<shape>:<rate>, det:<value>, sexp:<shift>:<rate>)",
            field='distribution'
        )

    def to_flag(self, rate_scale: float = 1.0) -> str:
        """Inverse of from_flag; rates are divided by rate_scale."""
        if self.kind is DistributionKind.EXPONENTIAL:
            return f"exp:{self.rate / rate_scale!r}"
        if self.kind is DistributionKind.ERLANG:
            return f"erlang:{self.shape}:{self.rate / rate_scale!r}"
        if self.kind is DistributionKind.DETERMINISTIC:
            return f"det:{self.value!r}"
        return f"sexp:{self.shift!r}:{self.rate / rate_scale!r}"

    def mean(self) -> float:
        if self.kind is DistributionKind.EXPONENTIAL:
            return 1.0 / self.rate
        if self.kind is DistributionKind.ERLANG:
            return self.shape / self.rate
        if self.kind is DistributionKind.DETERMINISTIC:
            return self.value
        return self.shift + 1.0 / self.rate

    def variance(self) -> float:
        if self.kind is DistributionKind.DETERMINISTIC:
            return 0.0
        if self.kind is DistributionKind.ERLANG:
            return self.shape / self.rate ** 2
        return 1.0 / self.rate ** 2

    def with_mean(self, mean: float) -> 'Distribution':
        """
        Same family, rescaled to the given mean.

        The shifted exponential keeps its shift and adjusts the exponential part.
        """
        if mean <= 0:
            raise ValidationError(f"mean must be > 0 (got {mean})", field='distribution')
        if self.kind is DistributionKind.EXPONENTIAL:
            return Distribution.exponential(1.0 / mean)
        if self.kind is DistributionKind.ERLANG:
            return Distribution.erlang(self.shape, self.shape / mean)
        if self.kind is DistributionKind.DETERMINISTIC:
            return Distribution.deterministic(mean)
        if mean <= self.shift:
            raise ValidationError(f"mean {mean} not above shift {self.shift}", field='distribution')
        return Distribution.shifted_exponential(self.shift, 1.0 / (mean - self.shift))

    def sample(self, rng: 'RngStream', size: Union[None, int, Tuple[int, ...]] = None):
        """Draw one variate (size=None) or an array of variates from the stream."""
        generator = rng.generator
        if self.kind is DistributionKind.EXPONENTIAL:
            return generator.exponential(1.0 / self.rate, size)
        if self.kind is DistributionKind.ERLANG:
            return generator.gamma(self.shape, 1.0 / self.rate, size)
        if self.kind is DistributionKind.DETERMINISTIC:
            return self.value if size is None else np.full(size, self.value)
        return self.shift + generator.exponential(1.0 / self.rate, size)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['kind'] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Distribution':
        return cls(**data)

class RngStream:
    """
    Reproducible random stream keyed by (seed, stream_id).

    Identical keys yield identical variate sequences across runs and platforms
    (numpy PCG64 seeded through SeedSequence with the stream id as spawn key).
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & (2 ** 64 - 1)
        self.stream_id = int(stream_id)
        self.generator = np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        )

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

def sample(dist: Distribution, rng: RngStream) -> float:
    """Draw a single nonnegative duration distributed per dist."""
    return float(dist.sample(rng))

class EmpiricalSample:
    """Sorted multiset of durations (sojourn, waiting or overhead realizations)."""

    def __init__(self, values: Iterable[float]):
        if not isinstance(values, np.ndarray):
            values = list(values)
        self.values = np.sort(np.asarray(values, dtype=float).ravel())

    @property
    def count(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.count

    def mean(self) -> float:
        if self.count == 0:
            raise EmptySampleError()
        return float(self.values.mean())

    def to_csv(self, path: str) -> None:
        pd.DataFrame({'value_ms': self.values}).to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: str) -> 'EmpiricalSample':
        frame = pd.read_csv(path, float_precision='round_trip')
        if 'value_ms' not in frame.columns:
            raise ValidationError(f"{path}: missing column value_ms", field='value_ms')
        return cls(frame['value_ms'].to_numpy(dtype=float))

def _order_index(q: float, count: int) -> int:
    # ceil(q·n) with a guard against 0.99*100 = 99.00000000000001
    return min(count, max(1, math.ceil(round(q * count, 9)))) - 1

def quantile(s: EmpiricalSample, q: float) -> float:
    """
    Type-1 (inverse-CDF) quantile: the order statistic at index ceil(q·n).

    Args:
        s: Sample
        q: Probability in (0, 1]

    Returns:
        Quantile value
    """
    if not 0 < q <= 1:
        raise ValueError(f"q must be in (0, 1] (got {q})")
    if s.count == 0:
        raise EmptySampleError()
    return float(s.values[_order_index(q, s.count)])

def ecdf(s: EmpiricalSample, t: Union[float, np.ndarray]):
    """Empirical CDF F(t) = #{x ≤ t} / n."""
    return np.searchsorted(s.values, t, side='right') / float(s.count)

def exceedance(s: EmpiricalSample, tau: float) -> float:
    """Empirical P[X > tau]."""
    if s.count == 0:
        raise EmptySampleError()
    return 1.0 - float(ecdf(s, tau))

def pp_plot(a: EmpiricalSample, b: EmpiricalSample, grid_size: int = Config.PP_GRID_SIZE) -> List[Tuple[float, float]]:
    """
    PP-plot points (F_a(t), F_b(t)) on a grid placed at quantiles of the pooled sample.

    Args:
        a: First sample
        b: Second sample
        grid_size: Number of evaluation points (≥ 2)

    Returns:
        List of (probability, probability) points, nondecreasing in both coordinates
    """
    if a.count == 0 or b.count == 0:
        raise EmptySampleError()
    if grid_size < 2:
        raise ValueError("grid_size must be ≥ 2")

    pooled = np.sort(np.concatenate([a.values, b.values]))
    probabilities = np.linspace(0.0, 1.0, grid_size)
    indices = np.clip(np.ceil(np.round(probabilities * pooled.size, 9)).astype(int) - 1, 0, pooled.size - 1)
    grid = pooled[indices]

    fa = ecdf(a, grid)
    fb = ecdf(b, grid)
    return [(float(x), float(y)) for x, y in zip(fa, fb)]

def max_pp_deviation(points: Sequence[Tuple[float, float]]) -> float:
    """Largest vertical distance between a PP curve and the diagonal."""
    if not points:
        return 0.0
    return float(max(abs(x - y) for x, y in points))

def boxplot_summary(s: EmpiricalSample) -> Dict[str, float]:
    """
    Box-plot statistics with the type-1 quantile estimator.

    Returns:
        Dictionary with min, q25, median, q75, max and mean
    """
    if s.count == 0:
        raise EmptySampleError()
    return {
        'min': float(s.values[0]),
        'q25': quantile(s, 0.25),
        'median': quantile(s, 0.5),
        'q75': quantile(s, 0.75),
        'max': float(s.values[-1]),
        'mean': s.mean()
    }
