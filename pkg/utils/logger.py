"""
Structured logging utility for the tiny-tasks toolkit.
"""
import logging
import json
import os
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from config import Config

CONTEXT_FIELDS = ('run_id', 'command', 'context')

_RUN_CONTEXT: dict = {}

def bind_run(run_id: str, command: str):
    """Stamp every following record with the run being executed."""
    _RUN_CONTEXT.clear()
    _RUN_CONTEXT.update(run_id=run_id, command=command)

class RunContextFilter(logging.Filter):
    """Fills run_id/command from the bound run unless the call passed its own."""

    def filter(self, record):
        for key, value in _RUN_CONTEXT.items():
            if not hasattr(record, key):
                setattr(record, key, value)
        return True

class JSONFormatter(logging.Formatter):
    """Custom JSON formatter for structured logging."""

    def format(self, record):
        log_entry = {
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'level': record.levelname,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno
        }

        for key in CONTEXT_FIELDS:
            if hasattr(record, key):
                log_entry[key] = getattr(record, key)
        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)

def setup_logger(name='tinytasks', log_file=None, level=None):
    """
    Set up and configure the logger.

    Args:
        name: Logger name
        log_file: Path to log file (defaults to Config.LOG_FILE, empty disables)
        level: Logging level (defaults to Config.LOG_LEVEL)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.INFO))

    # Prevent duplicate handlers
    if logger.handlers:
        return logger
    logger.addFilter(RunContextFilter())

    # File handler with rotation (only if writable)
    file_path = log_file or Config.LOG_FILE
    if file_path:
        try:
            file_dir = os.path.dirname(file_path)
            if file_dir and not os.path.exists(file_dir):
                os.makedirs(file_dir, exist_ok=True)

            file_handler = RotatingFileHandler(
                file_path,
                maxBytes=Config.LOG_MAX_BYTES,
                backupCount=Config.LOG_BACKUP_COUNT
            )
            file_handler.setFormatter(JSONFormatter())
            logger.addHandler(file_handler)
        except OSError as e:
            print(f"Failed to setup file logging: {e}", file=sys.stderr)

    # Console handler on stderr; stdout carries command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(JSONFormatter())
    logger.addHandler(console_handler)

    return logger

# Global logger instance
logger = setup_logger()

def log_with_context(logger_instance, level, message, run_id=None, command=None, context=None):
    """
    Log a message with additional context.

    Args:
        logger_instance: Logger to use
        level: Log level (DEBUG, INFO, WARNING, ERROR)
        message: Log message
        run_id: Optional run identifier (config digest prefix)
        command: Optional CLI command name
        context: Optional context dictionary
    """
    extra = {}
    if run_id:
        extra['run_id'] = run_id
    if command:
        extra['command'] = command
    if context:
        extra['context'] = context

    getattr(logger_instance, level.lower())(message, extra=extra)
