"""
LangGraph workflow definition for sweep rows.
"""
from langgraph.graph import StateGraph, END
from agent.state import SweepRowState
from agent.nodes import (
    validation_node,
    prepare_node,
    simulation_node,
    analytical_node,
    formatter_node
)
from utils.logger import logger

def create_workflow() -> StateGraph:
    """
    Create and configure the LangGraph workflow.

    Workflow structure:
    input → validation → prepare → [simulation, analytical] → formatter → output
    validation (error) → formatter

    Returns:
        Compiled StateGraph
    """
    workflow = StateGraph(SweepRowState)

    workflow.add_node("validation", validation_node)
    workflow.add_node("prepare", prepare_node)
    workflow.add_node("simulation", simulation_node)
    workflow.add_node("analytical", analytical_node)
    workflow.add_node("formatter", formatter_node)

    workflow.set_entry_point("validation")

    workflow.add_conditional_edges(
        "validation",
        _should_continue,
        {
            "continue": "prepare",
            "error": "formatter"
        }
    )

    # prepare → [simulation, analytical] (parallel); both no-op when prepare failed
    workflow.add_edge("prepare", "simulation")
    workflow.add_edge("prepare", "analytical")

    workflow.add_edge("simulation", "formatter")
    workflow.add_edge("analytical", "formatter")

    workflow.add_edge("formatter", END)

    return workflow.compile()

def _should_continue(state: SweepRowState) -> str:
    if state.get('status') == 'failed' or state.get('errors'):
        return "error"
    return "continue"

# Global workflow instance
workflow = create_workflow()

def initial_row_state(row_data: dict) -> SweepRowState:
    return SweepRowState(
        row_id=row_data.get('row_id', ''),
        vary=row_data.get('vary', ''),
        value=row_data.get('value'),
        base=row_data.get('base'),
        options=row_data.get('options', {}),
        config=None,
        model_params=None,
        analytical_note='',
        simulation=None,
        analytical=None,
        result=None,
        bound_rows=[],
        errors=[],
        status='processing'
    )

def failed_row(row_data: dict, error: str) -> dict:
    """Row output for a row the graph could not finish."""
    row_id = row_data.get('row_id', '')
    return {
        'row_id': row_id,
        'status': 'failed',
        'result': {'row_id': row_id, row_data.get('vary') or 'value': row_data.get('value'),
                   'status': 'failed', 'error': error},
        'bound_rows': []
    }

def process_row(row_data: dict) -> dict:
    """
    Evaluate one sweep row through the workflow.

    Args:
        row_data: row_id, vary, value, base (SystemConfig) and options

    Returns:
        Dictionary with the flat result row, bound rows and status
    """
    try:
        final_state = workflow.invoke(initial_row_state(row_data))
    except Exception as e:
        logger.error(f'Workflow execution error: {str(e)}', extra={'context': {'row': row_data.get('row_id')}})
        return failed_row(row_data, f'Workflow execution failed: {str(e)}')
    return {
        'row_id': final_state['row_id'],
        'status': final_state['status'],
        'result': final_state['result'],
        'bound_rows': final_state.get('bound_rows', [])
    }
