"""
(σ,ρ)-envelopes for iid increments (σ = 0) of arrival and service processes.

An envelope rate ρ(θ) = ln E[e^{θX}] / θ is kept together with its domain
(0, theta_max) and its θ→0⁺ limit, the mean of the increment. Functions are
unit-agnostic: any consistent time unit works.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple
from config import Config
from services.overhead import OverheadParams
from utils.validators import ValidationError, validate_model_params

class DomainError(ValueError):
    """θ outside the domain of an envelope or moment generating function."""

    def __init__(self, message: str = 'outside MGF domain', theta: Optional[float] = None):
        super().__init__(message if theta is None else f"{message} (theta={theta})")
        self.theta = theta

@dataclass(frozen=True)
class ModelParams:
    """Parameters shared by the analytical models (rates in 1/time)."""
    l: int
    k: int
    lam: float
    mu: float
    overhead: Optional[OverheadParams] = None

    def __post_init__(self):
        is_valid, error = validate_model_params(self)
        if not is_valid:
            raise ValidationError(error, field='params')

    @property
    def kappa(self) -> float:
        return self.k / self.l

    @property
    def utilization(self) -> float:
        """ϱ = λκ/μ, the overhead-free utilization."""
        return self.lam * self.kappa / self.mu

@dataclass(frozen=True)
class Envelope:
    """
    Envelope rate of an iid increment process.

    Service envelopes are nondecreasing in θ; arrival envelopes hold ρ_A(−θ),
    which is nonincreasing in θ.
    """
    rho: Callable[[float], float] = field(compare=False)
    theta_max: float
    kind_label: str
    mean: float
    # below this θ the rate is replaced by its limit, the mean
    series_below: float = 0.0

    def __call__(self, theta: float) -> float:
        if not 0 < theta < self.theta_max:
            raise DomainError(theta=theta)
        if theta < self.series_below:
            return self.mean
        return self.rho(theta)

    def __add__(self, other: 'Envelope') -> 'Envelope':
        a, b = self, other
        return Envelope(
            rho=lambda theta: a(theta) + b(theta),
            theta_max=min(a.theta_max, b.theta_max),
            kind_label=f"{a.kind_label}+{b.kind_label}",
            mean=a.mean + b.mean,
            series_below=max(a.series_below, b.series_below)
        )

    def scale(self, n: int) -> 'Envelope':
        """Envelope of the sum of n iid copies (n·ρ)."""
        if n == 1:
            return self
        base = self
        return Envelope(
            rho=lambda theta: n * base(theta),
            theta_max=base.theta_max,
            kind_label=f"{n}*{base.kind_label}",
            mean=n * base.mean,
            series_below=base.series_below
        )

    def shift(self, constant: float) -> 'Envelope':
        """Envelope of the increment plus a deterministic constant."""
        if constant == 0:
            return self
        base = self
        return Envelope(
            rho=lambda theta: constant + base(theta),
            theta_max=base.theta_max,
            kind_label=f"{base.kind_label}+{constant:g}",
            mean=base.mean + constant,
            series_below=base.series_below
        )

def series_cutoff(theta_max: float) -> float:
    return Config.THETA_SERIES_FRACTION * theta_max if math.isfinite(theta_max) else 0.0

def rho_arrival_exponential(lam: float, theta: float) -> float:
    """ρ_A(−θ) = −(1/θ)·ln(λ/(λ+θ)) for Poisson arrivals."""
    if theta <= 0:
        raise DomainError(theta=theta)
    return math.log1p(theta / lam) / theta

def rho_service_exponential(mu: float, theta: float) -> float:
    """ρ_S(θ) = (1/θ)·ln(μ/(μ−θ)) on (0, μ)."""
    if not 0 < theta < mu:
        raise DomainError(theta=theta)
    return -math.log1p(-theta / mu) / theta

def rho_X(l: int, mu: float, theta: float) -> float:
    """Envelope of the time until the first l tasks complete: Σ_{i=1}^l ln(iμ/(iμ−θ)) / θ."""
    if not 0 < theta < mu:
        raise DomainError(theta=theta)
    return math.fsum(-math.log1p(-theta / (i * mu)) for i in range(1, l + 1)) / theta

def rho_Z(l: int, mu: float, theta: float) -> float:
    """Envelope of the gap until the next of l busy workers frees up, on (0, lμ)."""
    if not 0 < theta < l * mu:
        raise DomainError(theta=theta)
    return -math.log1p(-theta / (l * mu)) / theta

def envelope_arrival_exponential(lam: float) -> Envelope:
    return Envelope(
        rho=lambda theta: rho_arrival_exponential(lam, theta),
        theta_max=math.inf,
        kind_label='arrival-exp',
        mean=1.0 / lam
    )

def envelope_arrival_deterministic(interval: float) -> Envelope:
    """Periodic arrivals: ρ_A(−θ) equals the interval for every θ."""
    return Envelope(rho=lambda theta: interval, theta_max=math.inf, kind_label='arrival-det', mean=interval)

def envelope_exponential_service(mu: float) -> Envelope:
    return Envelope(
        rho=lambda theta: rho_service_exponential(mu, theta),
        theta_max=mu,
        kind_label='exp',
        mean=1.0 / mu,
        series_below=series_cutoff(mu)
    )

def envelope_X(l: int, mu: float) -> Envelope:
    return Envelope(
        rho=lambda theta: rho_X(l, mu, theta),
        theta_max=mu,
        kind_label='X',
        mean=math.fsum(1.0 / (i * mu) for i in range(1, l + 1)),
        series_below=series_cutoff(mu)
    )

def envelope_Z(l: int, mu: float) -> Envelope:
    return Envelope(
        rho=lambda theta: rho_Z(l, mu, theta),
        theta_max=l * mu,
        kind_label='Z',
        mean=1.0 / (l * mu),
        series_below=series_cutoff(l * mu)
    )

def envelope_splitmerge_tiny(params: ModelParams) -> Envelope:
    """
    Job service envelope of split-merge with exponential tiny tasks.

    ρ_S(θ) = ρ_X(θ) + (k−l)·ρ_Z(θ) on (0, μ); with k = l it is the big-tasks
    exponential envelope ρ_X.
    """
    if params.k < params.l:
        raise ValidationError("k must be ≥ l", field='k')
    envelope = envelope_X(params.l, params.mu)
    if params.k > params.l:
        envelope = envelope + envelope_Z(params.l, params.mu).scale(params.k - params.l)
    return envelope

def expected_job_service_tiny(params: ModelParams) -> float:
    """E[Δ(n)] = (1/μ)(k/l + Σ_{i=2}^l 1/i)."""
    return (params.k / params.l + math.fsum(1.0 / i for i in range(2, params.l + 1))) / params.mu

def stability_tiny(l: int, kappa: float) -> float:
    """Largest stable utilization of tiny-tasks split-merge: 1/(1 + (1/κ)Σ_{i=2}^l 1/i)."""
    return 1.0 / (1.0 + math.fsum(1.0 / i for i in range(2, l + 1)) / kappa)

def envelope_ideal_partition(params: ModelParams) -> Envelope:
    """Job workload split into l equal parts: ρ_Q(θ) = (k/θ)·ln(lμ/(lμ−θ)) on (0, lμ)."""
    envelope = envelope_Z(params.l, params.mu).scale(params.k)
    return Envelope(envelope.rho, envelope.theta_max, 'ideal', envelope.mean, envelope.series_below)

def envelope_overhead_fj(params: ModelParams) -> Tuple[Envelope, Envelope]:
    """
    Overhead-augmented fork-join envelopes.

    The mean task-service overhead shifts ρ_X in full and ρ_Z by a 1/l share;
    domains are unchanged.
    """
    overhead = params.overhead or OverheadParams()
    per_task = overhead.mean_task_overhead
    return (envelope_X(params.l, params.mu).shift(per_task),
            envelope_Z(params.l, params.mu).shift(per_task / params.l))
