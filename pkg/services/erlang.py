"""
Maximum of l iid Erlang(κ, μ) task service times.

Needed by the big-tasks split-merge model, where each of the l tasks of a job
carries κ exponential phases: its job service time Δ(n) is the maximum of l
Erlang variates. Tails are evaluated in log space and integrated with
scipy quadrature over doubling segments.
"""
import math
from typing import Any, Callable, Dict, Optional
import numpy as np
from scipy import integrate, special
from config import Config
from services.envelopes import DomainError, Envelope, envelope_X, series_cutoff
from utils.logger import logger, log_with_context
from utils.validators import ValidationError

MAX_SEGMENTS = 200

class QuadratureError(RuntimeError):
    """Numerical integration did not converge."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}

def _phases(kappa: float) -> int:
    if kappa < 1 or int(kappa) != kappa:
        raise ValidationError(f"kappa must be an integer ≥ 1 for Erlang tasks (got {kappa})", field='kappa')
    return int(kappa)

def erlang_cdf(kappa: int, mu: float, x: float) -> float:
    """P[Q ≤ x] = 1 − e^{−μx} Σ_{i<κ} (μx)^i / i!."""
    if x < 0:
        raise DomainError("x must be ≥ 0")
    return float(special.gammainc(_phases(kappa), mu * x))

def _log_sf(kappa: int, mu: float, x: float) -> float:
    # ln P[Q > x] = −μx + ln Σ_{i<κ} (μx)^i / i!
    if x <= 0:
        return 0.0
    i = np.arange(kappa)
    return -mu * x + float(special.logsumexp(i * math.log(mu * x) - special.gammaln(i + 1)))

def _max_tail(l: int, kappa: int, mu: float, x: float) -> float:
    """1 − F(x)^l, accurate when F(x) is close to one."""
    sf = math.exp(_log_sf(kappa, mu, x))
    if sf >= 1.0:
        return 1.0
    return -math.expm1(l * math.log1p(-sf))

def _log_max_tail(l: int, kappa: int, mu: float, x: float) -> float:
    """ln(1 − F(x)^l), finite far beyond the underflow point of the tail itself."""
    log_sf = _log_sf(kappa, mu, x)
    if log_sf >= 0.0:
        return 0.0
    if log_sf < -700.0:
        return math.log(l) + log_sf
    return math.log(-math.expm1(l * math.log1p(-math.exp(log_sf))))

def _integrate_to_tail(integrand: Callable[[float], float], log_tail_bound: Callable[[float], float],
                       first_upper: float, label: str) -> float:
    """
    ∫₀^∞ integrand over segments [0, U], [U, 2U], ... until the integrand
    bound at the segment end drops below QUAD_TAIL_TOL.
    """
    total = 0.0
    lower, upper = 0.0, first_upper
    threshold = math.log(Config.QUAD_TAIL_TOL)
    for _ in range(MAX_SEGMENTS):
        result = integrate.quad(integrand, lower, upper, epsabs=1e-15, epsrel=Config.QUAD_RTOL,
                                limit=Config.QUAD_LIMIT, full_output=1)
        value, abserr = result[0], result[1]
        if len(result) > 3 and abserr > 1e-9 * max(abs(value), 1.0):
            diagnostics = {'integral': label, 'segment': [lower, upper], 'abserr': abserr, 'message': result[3]}
            log_with_context(logger, 'DEBUG', 'Quadrature did not converge', context=diagnostics)
            raise QuadratureError(f"{label}: quadrature did not converge on [{lower}, {upper}]", diagnostics)
        total += value
        if log_tail_bound(upper) < threshold:
            return total
        lower, upper = upper, 2.0 * upper
    raise QuadratureError(f"{label}: tail did not vanish after {MAX_SEGMENTS} segments",
                          {'integral': label, 'last_upper': upper})

def expected_max_erlang(l: int, kappa: int, mu: float) -> float:
    """E[Δ] = ∫₀^∞ 1 − P[Q ≤ x]^l dx for l iid Erlang(κ, μ) tasks."""
    kappa = _phases(kappa)
    return _integrate_to_tail(
        lambda x: _max_tail(l, kappa, mu, x),
        lambda x: math.log(l) + _log_sf(kappa, mu, x),
        kappa / mu,
        'expected_max_erlang'
    )

def _mgf_excess(l: int, kappa: int, mu: float, theta: float) -> float:
    # E[e^{θΔ}] − 1 = θ ∫₀^∞ e^{θu} (1 − F(u)^l) du
    def integrand(u: float) -> float:
        return math.exp(theta * u + _log_max_tail(l, kappa, mu, u))

    try:
        integral = _integrate_to_tail(
            integrand,
            lambda u: math.log(l) + _log_sf(kappa, mu, u) + theta * u,
            kappa / mu,
            'mgf_max_erlang'
        )
    except (OverflowError, QuadratureError):
        # close to θ = μ: outside the usable domain
        return math.inf
    return theta * integral

def mgf_max_erlang(l: int, kappa: int, mu: float, theta: float) -> float:
    """E[e^{θΔ}] of the maximum of l Erlang(κ, μ) variates, for 0 < θ < μ."""
    if not 0 < theta < mu:
        raise DomainError(theta=theta)
    return 1.0 + _mgf_excess(l, _phases(kappa), mu, theta)

def envelope_splitmerge_big(l: int, kappa: int, mu: float) -> Envelope:
    """
    Job service envelope of big-tasks split-merge with Erlang(κ, μ) tasks.

    With κ = 1 the maximum of exponentials has the closed form ρ_X.
    """
    kappa = _phases(kappa)
    if kappa == 1:
        return envelope_X(l, mu)
    return Envelope(
        rho=lambda theta: math.log1p(_mgf_excess(l, kappa, mu, theta)) / theta,
        theta_max=mu,
        kind_label='sm-big',
        mean=expected_max_erlang(l, kappa, mu),
        series_below=series_cutoff(mu)
    )

def stability_big(l: int, kappa: int, mu: float = 1.0) -> float:
    """
    Largest stable utilization of big-tasks split-merge: κ/(μ·E[Δ]).

    With κ = 1 this is 1/H_l; the value does not depend on μ.
    """
    kappa = _phases(kappa)
    if kappa == 1:
        return 1.0 / math.fsum(1.0 / i for i in range(1, l + 1))
    return min(1.0, kappa / (mu * expected_max_erlang(l, kappa, mu)))
