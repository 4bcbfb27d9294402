"""
LangGraph state definition for the sweep-row workflow.
"""
import operator
from typing import Annotated, TypedDict, List, Dict, Any, Optional

class SweepRowState(TypedDict):
    """State schema for evaluating one sweep row."""
    # Input data
    row_id: str
    vary: str
    value: float
    base: Any  # SystemConfig
    options: Dict[str, Any]

    # Prepared inputs
    config: Optional[Any]  # SystemConfig
    model_params: Optional[Any]  # ModelParams, None when no analytical model applies
    analytical_note: str

    # Parallel branches
    simulation: Optional[Dict[str, Any]]
    analytical: Optional[List[Dict[str, Any]]]

    # Output
    result: Optional[Dict[str, Any]]
    bound_rows: List[Dict[str, Any]]

    # Error handling (parallel nodes append)
    errors: Annotated[List[str], operator.add]
    status: str  # 'processing', 'completed', 'failed'
