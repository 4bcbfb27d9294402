"""
LangGraph workflow nodes for evaluating one sweep row.

simulation and analytical run in parallel; each returns only the keys it owns.
"""
from typing import Dict, Any, List
from agent.state import SweepRowState
from services.bounds import analytical_params, bound_for_model
from services.simulator import run
from services.stochastic import exceedance
from utils.validators import ValidationError, validate_epsilon
from utils.logger import logger, log_with_context
from config import Config

VARIABLES = ('k', 'lambda', 'l')

def validation_node(state: SweepRowState) -> Dict[str, Any]:
    """
    Validate the row request.

    Node: validation
    """
    errors = []
    if state['vary'] not in VARIABLES:
        errors.append(f"Validation error: cannot vary '{state['vary']}'")
    if not isinstance(state['value'], (int, float)) or state['value'] <= 0:
        errors.append(f"Validation error: value must be > 0 (got {state['value']})")
    for epsilon in state['options'].get('epsilon_list', []):
        is_valid, error_msg = validate_epsilon(epsilon)
        if not is_valid:
            errors.append(f'Validation error: {error_msg}')

    if errors:
        log_with_context(logger, 'WARNING', f'Row {state["row_id"]} rejected', context={'errors': errors})
        return {'errors': errors, 'status': 'failed'}
    return {'status': 'processing'}

def prepare_node(state: SweepRowState) -> Dict[str, Any]:
    """
    Derive the row's SystemConfig and, where one applies, its ModelParams.

    Node: prepare
    """
    try:
        config = state['base'].vary(state['vary'], state['value'], state['options'].get('pin_mu', False))
        params, note = analytical_params(config)
        log_with_context(logger, 'INFO', f'Prepared row {state["row_id"]}',
                         context={'l': config.l, 'k': config.k, 'utilization': round(config.utilization, 6)})
        return {'config': config, 'model_params': params, 'analytical_note': note}
    except ValidationError as e:
        return {'errors': [f'Configuration error ({e.field}): {e}'], 'status': 'failed'}
    except Exception as e:
        error_msg = f'Prepare node error: {str(e)}'
        log_with_context(logger, 'ERROR', error_msg, context={'row': state['row_id']})
        return {'errors': [error_msg], 'status': 'failed'}

def simulation_node(state: SweepRowState) -> Dict[str, Any]:
    """
    Simulate the row configuration.

    Node: simulation
    """
    config = state.get('config')
    if config is None or not state['options'].get('simulate', True):
        return {}

    try:
        result = run(config)
        summary = result.summary()
        return {'simulation': {
            'quantiles': summary['quantiles'],
            'mean_sojourn': summary['mean_sojourn'],
            'mean_waiting': summary['mean_waiting'],
            'mean_job_service': summary['mean_job_service'],
            'stable': summary['stable'],
            'sojourn': result.sojourn_sample()
        }}
    except Exception as e:
        error_msg = f'Simulation node error: {str(e)}'
        log_with_context(logger, 'ERROR', error_msg, context={'row': state['row_id']})
        return {'errors': [error_msg]}

def analytical_node(state: SweepRowState) -> Dict[str, Any]:
    """
    Bounds (or overhead approximations) for every requested epsilon.

    Node: analytical
    """
    params = state.get('model_params')
    config = state.get('config')
    if config is None or params is None or not state['options'].get('compare_analytical', True):
        return {}

    try:
        results = [bound_for_model(config.model, params, epsilon)
                   for epsilon in state['options'].get('epsilon_list', [])]
        return {'analytical': [r.to_dict() for r in results]}
    except Exception as e:
        error_msg = f'Analytical node error: {str(e)}'
        log_with_context(logger, 'ERROR', error_msg, context={'row': state['row_id']})
        return {'errors': [error_msg]}

def _epsilon_key(epsilon: float) -> str:
    return f'{epsilon:g}'

def formatter_node(state: SweepRowState) -> Dict[str, Any]:
    """
    Flatten the branches into one table row plus bound CSV rows.

    Node: formatter
    """
    row: Dict[str, Any] = {'row_id': state['row_id'], state['vary']: state['value']}
    config = state.get('config')
    if config is not None:
        row.update({'l': config.l, 'k': config.k, 'utilization': config.utilization})

    simulation = state.get('simulation')
    if simulation:
        for q in Config.REPORT_QUANTILES:
            row[f'sim_q{q}'] = simulation['quantiles'][str(q)]
        row['sim_mean_sojourn'] = simulation['mean_sojourn']
        row['sim_mean_job_service'] = simulation['mean_job_service']
        row['stable'] = simulation['stable']

    bound_rows: List[Dict[str, Any]] = []
    for bound in state.get('analytical') or []:
        key = _epsilon_key(bound['epsilon'])
        row[f'tau_{key}'] = bound['tau']
        row[f'feasible_{key}'] = bound['feasible']
        if simulation and bound['feasible']:
            row[f'exceedance_{key}'] = exceedance(simulation['sojourn'], bound['tau'])
        bound_rows.append({
            'k': config.k,
            'epsilon': bound['epsilon'],
            'theta_star': bound['theta_star'],
            'tau_ms': bound['tau'],
            'feasible': bound['feasible']
        })
    if state.get('analytical_note'):
        row['analytical_note'] = state['analytical_note']

    errors = state.get('errors') or []
    status = 'failed' if errors else 'completed'
    row['status'] = status
    if errors:
        row['error'] = '; '.join(errors)

    log_with_context(logger, 'INFO', f'Row {state["row_id"]} {status}')
    return {'result': row, 'bound_rows': bound_rows, 'status': status}
