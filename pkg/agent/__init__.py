"""LangGraph pipeline that validates a run, simulates it, evaluates its bound and formats a result row."""
