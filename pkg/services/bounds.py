"""
Statistical waiting and sojourn time bounds by θ-optimization.

Every bound has the form P[X > τ] ≤ ε with τ(θ) minimized over the θ that
satisfy the stability condition ρ_S(θ) ≤ ρ_A(−θ). The feasibility limit is
isolated by bisection on g(θ) = ρ_A(−θ) − ρ_S(θ), which is decreasing; the
objective is then minimized with bounded Brent search below that limit.
Infeasible configurations are results (feasible=False), not errors.
"""
import math
from dataclasses import dataclass, asdict
from typing import Any, Callable, Dict, List, Optional, Tuple
from scipy import optimize
from config import Config
from services.envelopes import (
    Envelope,
    ModelParams,
    envelope_arrival_exponential,
    envelope_exponential_service,
    envelope_ideal_partition,
    envelope_overhead_fj,
    envelope_splitmerge_tiny,
    envelope_X,
    envelope_Z
)
from services.erlang import envelope_splitmerge_big
from services.overhead import OverheadParams
from services.simulator import Model, SystemConfig
from services.stochastic import DistributionKind
from utils.validators import ValidationError, validate_epsilon

METRICS = ('waiting', 'sojourn')

@dataclass(frozen=True)
class BoundResult:
    feasible: bool
    theta_star: Optional[float]
    tau: Optional[float]
    epsilon: float
    metric: str = 'sojourn'
    approximation: bool = False
    label: str = ''

    @classmethod
    def infeasible(cls, epsilon: float, metric: str, label: str, approximation: bool = False) -> 'BoundResult':
        return cls(False, None, None, epsilon, metric, approximation, label)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

def _check_epsilon(epsilon: float):
    is_valid, error = validate_epsilon(epsilon)
    if not is_valid:
        raise ValidationError(error, field='epsilon')

def _check_metric(metric: str):
    if metric not in METRICS:
        raise ValidationError(f"metric must be one of {', '.join(METRICS)} (got {metric})", field='metric')

def feasible_theta_limit(constraint: Envelope, arrival: Envelope, theta_cap: float = math.inf) -> Optional[float]:
    """
    Largest θ below min(theta_max, theta_cap) with constraint(θ) ≤ arrival(θ).

    Returns:
        The limit, or None when no θ satisfies the condition
    """
    upper = min(constraint.theta_max, theta_cap) * (1.0 - Config.THETA_EDGE_FRACTION)
    lower = Config.THETA_SERIES_FRACTION * upper

    def gap(theta: float) -> float:
        return arrival(theta) - constraint(theta)

    if gap(lower) <= 0:
        return None
    if gap(upper) >= 0:
        return upper

    limit = optimize.bisect(gap, lower, upper, rtol=Config.OPT_RTOL, maxiter=Config.OPT_MAX_ITER)
    # bisection may land a hair beyond the boundary
    while gap(limit) < 0:
        limit = lower + (limit - lower) * (1.0 - 4 * Config.OPT_RTOL)
    return limit

def _minimize(objective: Callable[[float], float], upper: float) -> Tuple[float, float]:
    lower = Config.THETA_SERIES_FRACTION * upper
    result = optimize.minimize_scalar(
        objective,
        bounds=(lower, upper),
        method='bounded',
        options={'xatol': Config.OPT_RTOL * upper, 'maxiter': Config.OPT_MAX_ITER}
    )
    at_limit = objective(upper)
    if at_limit <= result.fun:
        return upper, at_limit
    return float(result.x), float(result.fun)

def _optimize_bound(constraint: Envelope, arrival: Envelope, objective: Callable[[float], float],
                    epsilon: float, metric: str, label: str, approximation: bool = False,
                    theta_cap: float = math.inf, decreasing: bool = False) -> BoundResult:
    limit = feasible_theta_limit(constraint, arrival, theta_cap)
    if limit is None:
        return BoundResult.infeasible(epsilon, metric, label, approximation)
    if decreasing:
        theta_star, tau = limit, objective(limit)
    else:
        theta_star, tau = _minimize(objective, limit)
    return BoundResult(True, theta_star, tau, epsilon, metric, approximation, label)

def bound_single_server(rho_S: Envelope, rho_A: Envelope, epsilon: float, want: str = 'sojourn',
                        label: str = 'single-server', approximation: bool = False) -> BoundResult:
    """
    Waiting or sojourn bound of a FIFO queue with iid service increments.

    waiting: τ = −ln(ε)/θ, minimized at the largest feasible θ.
    sojourn: τ = ρ_S(θ) − ln(ε)/θ.
    """
    _check_epsilon(epsilon)
    _check_metric(want)
    log_eps = math.log(epsilon)
    if want == 'waiting':
        return _optimize_bound(rho_S, rho_A, lambda theta: -log_eps / theta, epsilon, want, label,
                               approximation, decreasing=True)
    return _optimize_bound(rho_S, rho_A, lambda theta: rho_S(theta) - log_eps / theta, epsilon, want, label,
                           approximation)

def bound_forkjoin_conventional(params: ModelParams, epsilon: float) -> BoundResult:
    """
    Fork-join with one exponential task per server and a union bound over servers:
    τ = ρ_Q(θ) + (ln l − ln ε)/θ.
    """
    _check_epsilon(epsilon)
    if params.k != params.l:
        raise ValidationError("k must equal l for conventional fork-join", field='k')
    service = envelope_exponential_service(params.mu)
    constant = math.log(params.l) - math.log(epsilon)
    return _optimize_bound(service, envelope_arrival_exponential(params.lam),
                           lambda theta: service(theta) + constant / theta,
                           epsilon, 'sojourn', 'fj')

def _forkjoin_tiny(x_env: Envelope, z_env: Envelope, params: ModelParams, epsilon: float,
                   task_index: Optional[int], label: str, approximation: bool) -> BoundResult:
    _check_epsilon(epsilon)
    if params.k < params.l:
        raise ValidationError("k must be ≥ l", field='k')
    log_eps = math.log(epsilon)
    constraint = z_env.scale(params.k)
    arrival = envelope_arrival_exponential(params.lam)

    if task_index is not None:
        if not 1 <= task_index <= params.k:
            raise ValidationError(f"task index must be in [1, {params.k}]", field='task_index')
        if task_index == 1:
            return _optimize_bound(constraint, arrival, lambda theta: -log_eps / theta, epsilon, 'waiting',
                                   label, approximation, theta_cap=params.mu, decreasing=True)
        ahead = z_env.scale(task_index - 1)
        return _optimize_bound(constraint, arrival, lambda theta: ahead(theta) - log_eps / theta, epsilon,
                               'waiting', label, approximation, theta_cap=params.mu)

    service = x_env if params.k == 1 else z_env.scale(params.k - 1) + x_env
    return _optimize_bound(constraint, arrival, lambda theta: service(theta) - log_eps / theta, epsilon,
                           'sojourn', label, approximation, theta_cap=params.mu)

def bound_forkjoin_tiny(params: ModelParams, epsilon: float, task_index: Optional[int] = None) -> BoundResult:
    """
    Single-queue fork-join with exponential tiny tasks.

    Waiting of task i: τ = (i−1)ρ_Z(θ) − ln(ε)/θ; sojourn:
    τ = (k−1)ρ_Z(θ) + ρ_X(θ) − ln(ε)/θ; both subject to kρ_Z(θ) ≤ ρ_A(−θ),
    θ ∈ (0, μ).
    """
    return _forkjoin_tiny(envelope_X(params.l, params.mu), envelope_Z(params.l, params.mu), params, epsilon,
                          task_index, 'fj-tiny', False)

def approx_sojourn_fj_overhead(params: ModelParams, epsilon: float) -> BoundResult:
    """
    Sojourn quantile approximation of fork-join with scheduling overhead.

    Runs the tiny-tasks fork-join bound on the overhead-shifted envelopes and adds
    the pre-departure delay c_pd_job + k·c_pd_task afterwards.
    """
    x_env, z_env = envelope_overhead_fj(params)
    result = _forkjoin_tiny(x_env, z_env, params, epsilon, None, 'fj-overhead', True)
    if not result.feasible:
        return result
    overhead = params.overhead or OverheadParams()
    pre_departure = overhead.pre_departure(params.k)
    if pre_departure == 0:
        return result
    return BoundResult(True, result.theta_star, result.tau + pre_departure, epsilon, 'sojourn', True, result.label)

def bound_splitmerge_tiny(params: ModelParams, epsilon: float, metric: str = 'sojourn') -> BoundResult:
    """Split-merge with exponential tiny tasks (job service envelope ρ_X + (k−l)ρ_Z)."""
    return bound_single_server(envelope_splitmerge_tiny(params), envelope_arrival_exponential(params.lam),
                               epsilon, metric, label='sm-tiny')

def approx_sojourn_sm_overhead(params: ModelParams, epsilon: float) -> BoundResult:
    """
    Sojourn quantile approximation of split-merge with scheduling overhead.

    Pre-departure overhead blocks the next job, so it enters the service envelope:
    ρ_X^o = ρ_X + E[O] + c_pd_job + k·c_pd_task and ρ_Z^o = ρ_Z + E[O]/l.
    """
    if params.k < params.l:
        raise ValidationError("k must be ≥ l", field='k')
    overhead = params.overhead or OverheadParams()
    per_task = overhead.mean_task_overhead
    service = envelope_X(params.l, params.mu).shift(per_task + overhead.pre_departure(params.k))
    if params.k > params.l:
        service = service + envelope_Z(params.l, params.mu).shift(per_task / params.l).scale(params.k - params.l)
    return bound_single_server(service, envelope_arrival_exponential(params.lam), epsilon, 'sojourn',
                               label='sm-overhead', approximation=True)

def bound_splitmerge_big(params: ModelParams, epsilon: float, metric: str = 'sojourn') -> BoundResult:
    """Split-merge with l big tasks per job, each Erlang(κ, μ) with κ = k/l."""
    service = envelope_splitmerge_big(params.l, params.kappa, params.mu)
    return bound_single_server(service, envelope_arrival_exponential(params.lam), epsilon, metric,
                               label='sm-big')

def bound_ideal_partition(params: ModelParams, epsilon: float, metric: str = 'sojourn') -> BoundResult:
    """Reference system: the job workload splits into l equal parts served in unison."""
    return bound_single_server(envelope_ideal_partition(params), envelope_arrival_exponential(params.lam),
                               epsilon, metric, label='ideal')

def refinement_comparison(l: int, kappa: int, mu: float, lam: float, epsilon: float) -> Dict[str, BoundResult]:
    """
    Big tasks against tiny tasks for the same job workload distribution.

    big: l Erlang(κ, μ) tasks per job; tiny: κ·l exponential tasks per job.
    """
    params = ModelParams(l=l, k=int(kappa) * l, lam=lam, mu=mu)
    return {
        'big': bound_splitmerge_big(params, epsilon),
        'tiny': bound_splitmerge_tiny(params, epsilon)
    }

def parallelism_scaling(l_values: List[int], lam: float, mu: float, epsilon: float) -> List[Dict[str, Any]]:
    """
    Sojourn bounds versus the number of servers for jobs of l exponential tasks.

    Returns:
        One row per l with tau of split-merge, fork-join, single-queue
        fork-join and the ideal partition (None where infeasible)
    """
    rows = []
    for l in l_values:
        params = ModelParams(l=l, k=l, lam=lam, mu=mu)
        results = {
            'sm': bound_splitmerge_tiny(params, epsilon),
            'fj': bound_forkjoin_conventional(params, epsilon),
            'sqfj': bound_forkjoin_tiny(params, epsilon),
            'ideal': bound_ideal_partition(params, epsilon)
        }
        row = {'l': l}
        row.update({name: (result.tau if result.feasible else None) for name, result in results.items()})
        rows.append(row)
    return rows

def analytical_params(config: SystemConfig) -> Tuple[Optional[ModelParams], str]:
    """
    ModelParams matching a simulated configuration.

    Returns:
        Tuple of (params, note); params is None with the reason in note when no
        analytical model covers the configuration
    """
    if config.arrival.kind is not DistributionKind.EXPONENTIAL:
        return None, 'analytical bounds need exponential inter-arrival times'
    if config.task_execution.kind is not DistributionKind.EXPONENTIAL:
        return None, 'analytical bounds need exponential task execution times'
    overhead = None if config.overhead.is_zero else config.overhead
    if overhead is not None and config.model in (Model.CONVENTIONAL_FORK_JOIN, Model.IDEAL_PARTITION):
        return None, f'no overhead approximation for model {config.model.value}'
    return ModelParams(l=config.l, k=config.k, lam=config.arrival.rate, mu=config.task_execution.rate,
                       overhead=overhead), ''

def bound_for_model(model: Model, params: ModelParams, epsilon: float) -> BoundResult:
    """Sojourn bound (or overhead approximation when params carry overhead) of a simulator model."""
    model = Model(model)
    with_overhead = params.overhead is not None and not params.overhead.is_zero
    if model is Model.SPLIT_MERGE:
        return approx_sojourn_sm_overhead(params, epsilon) if with_overhead else bound_splitmerge_tiny(params, epsilon)
    if model is Model.SINGLE_QUEUE_FORK_JOIN:
        return approx_sojourn_fj_overhead(params, epsilon) if with_overhead else bound_forkjoin_tiny(params, epsilon)
    if model is Model.CONVENTIONAL_FORK_JOIN:
        return bound_forkjoin_conventional(params, epsilon)
    return bound_ideal_partition(params, epsilon)
