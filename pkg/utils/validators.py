"""
Input validation utilities for the tiny-tasks toolkit.
"""
import math
from typing import Any, Dict, Optional

class ValidationError(Exception):
    """Custom exception for validation errors."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field

MODELS = ('sm', 'sqfj', 'fj', 'ideal')
DISTRIBUTION_KINDS = ('exp', 'erlang', 'det', 'sexp')

def _finite(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)

def validate_distribution(kind: str, rate: float, shape: int, value: float, shift: float) -> tuple[bool, Optional[str]]:
    """
    Validate the parameters of a random-variate law.

    Args:
        kind: One of exp, erlang, det, sexp
        rate: Rate parameter (1/time), used by exp, erlang, sexp
        shape: Erlang shape
        value: Deterministic value
        shift: Shift of the shifted exponential

    Returns:
        Tuple of (is_valid, error_message)
    """
    if kind not in DISTRIBUTION_KINDS:
        return False, f"unknown distribution kind: {kind}"

    if kind in ('exp', 'erlang', 'sexp'):
        if not _finite(rate) or rate <= 0:
            return False, f"rate must be > 0 (got {rate})"

    if kind == 'erlang':
        if isinstance(shape, bool) or not isinstance(shape, int) or shape < 1:
            return False, f"shape must be an integer ≥ 1 (got {shape})"

    if kind == 'det':
        if not _finite(value) or value < 0:
            return False, f"value must be ≥ 0 (got {value})"

    if kind == 'sexp':
        if not _finite(shift) or shift < 0:
            return False, f"shift must be ≥ 0 (got {shift})"

    return True, None

def validate_overhead(c_ts_task: float, mu_ts_task: float, c_pd_job: float, c_pd_task: float) -> tuple[bool, Optional[str]]:
    """
    Validate overhead parameters (all nonnegative; mu_ts_task = 0 disables the exponential part).

    Returns:
        Tuple of (is_valid, error_message)
    """
    fields = {
        'c_ts_task': c_ts_task,
        'mu_ts_task': mu_ts_task,
        'c_pd_job': c_pd_job,
        'c_pd_task': c_pd_task
    }
    for name, value in fields.items():
        if not _finite(value):
            return False, f"{name} must be a finite number"
        if value < 0:
            return False, f"{name} must be ≥ 0 (got {value})"
    return True, None

def validate_system_config(config: Any) -> tuple[bool, Optional[str], Optional[str]]:
    """
    Validate a simulation configuration.

    Args:
        config: SystemConfig-like object

    Returns:
        Tuple of (is_valid, error_message, offending_field)
    """
    model = getattr(config.model, 'value', config.model)
    if model not in MODELS:
        return False, f"unknown model: {model}", 'model'

    if isinstance(config.l, bool) or not isinstance(config.l, int) or config.l < 1:
        return False, "l must be an integer ≥ 1", 'l'

    if isinstance(config.k, bool) or not isinstance(config.k, int) or config.k < 1:
        return False, "k must be an integer ≥ 1", 'k'

    if model in ('sm', 'sqfj') and config.k < config.l:
        return False, "k must be ≥ l", 'k'

    if model == 'fj' and config.k != config.l:
        return False, "k must equal l for conventional fork-join", 'k'

    if isinstance(config.n_jobs, bool) or not isinstance(config.n_jobs, int) or config.n_jobs < 1:
        return False, "n_jobs must be an integer ≥ 1", 'n_jobs'

    if not isinstance(config.seed, int) or config.seed < 0 or config.seed >= 2 ** 64:
        return False, "seed must be a 64-bit nonnegative integer", 'seed'

    if config.warmup_jobs < 0:
        return False, "warmup_jobs must be ≥ 0", 'warmup_jobs'

    return True, None, None

def validate_model_params(params: Any) -> tuple[bool, Optional[str]]:
    """
    Validate analytical model parameters.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if params.l < 1:
        return False, "l must be ≥ 1"
    if params.k < params.l:
        return False, "k must be ≥ l"
    if not _finite(params.lam) or params.lam <= 0:
        return False, "lambda must be > 0"
    if not _finite(params.mu) or params.mu <= 0:
        return False, "mu must be > 0"
    return True, None

def validate_epsilon(epsilon: float, allow_one: bool = True) -> tuple[bool, Optional[str]]:
    """
    Validate a violation probability.

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not _finite(epsilon) or epsilon <= 0 or epsilon > 1 or (epsilon == 1 and not allow_one):
        return False, f"epsilon must be in (0, 1{']' if allow_one else ')'} (got {epsilon})"
    return True, None

def validate_config_file(data: Dict[str, Any], allowed: set) -> tuple[bool, Optional[str]]:
    """
    Validate a JSON run-config file.

    Args:
        data: Parsed JSON content
        allowed: Keys accepted by the command

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not isinstance(data, dict):
        return False, "config file must contain a JSON object"

    unknown = sorted(set(data) - allowed)
    if unknown:
        return False, f"unknown config keys: {', '.join(unknown)}"

    return True, None
