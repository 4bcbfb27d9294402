"""
Configuration settings for the tiny-tasks parallel systems toolkit.
"""
import os
import psutil
from dotenv import load_dotenv

load_dotenv()

class Config:
    """Configuration settings for simulations, bounds and experiment runs"""

    # Tool identity (echoed into every run manifest)
    TOOL_NAME = 'tinytasks'
    TOOL_VERSION = os.environ.get('TINYTASKS_VERSION') or '1.0.0'

    # Base directory
    BASE_DIR = os.path.abspath(os.path.dirname(__file__))

    # Artifact output
    OUTPUT_DIR = os.environ.get('TINYTASKS_OUTPUT_DIR') or os.path.join(os.getcwd(), 'results')

    # Logging configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = os.environ.get('LOG_FILE', '')  # empty: console only
    LOG_MAX_BYTES = int(os.environ.get('LOG_MAX_BYTES', 10485760))  # 10MB
    LOG_BACKUP_COUNT = int(os.environ.get('LOG_BACKUP_COUNT', 5))

    # Run defaults
    DEFAULT_SEED = int(os.environ.get('TINYTASKS_SEED', 1))
    DEFAULT_THREADS = int(os.environ.get('TINYTASKS_THREADS', 0)) or psutil.cpu_count(logical=True) or 1
    DEFAULT_JOBS = int(os.environ.get('TINYTASKS_JOBS', 30000))

    # Simulation
    WARMUP_JOBS = int(os.environ.get('TINYTASKS_WARMUP_JOBS', 1000))
    SIM_CHUNK_JOBS = 2048

    # Instability detection
    STABILITY_JOBS = int(os.environ.get('TINYTASKS_STABILITY_JOBS', 50000))
    STABILITY_BRACKET = (0.05, 0.99)
    STABILITY_RESOLUTION = 0.01
    STABILITY_GROWTH_FACTOR = 2.0  # last decile vs fourth decile mean waiting
    STABILITY_QUEUE_FACTOR = 10  # jobs in system at the end, per worker
    STABILITY_DRIFT_FRACTION = 0.005  # second-half waiting slope per job, in mean inter-arrival times

    # Statistics
    PP_GRID_SIZE = 512
    REPORT_QUANTILES = (0.5, 0.9, 0.99)

    # Numerics
    THETA_SERIES_FRACTION = 1e-8
    THETA_EDGE_FRACTION = 1e-9
    OPT_MAX_ITER = 200
    OPT_RTOL = 1e-10
    QUAD_TAIL_TOL = 1e-12
    QUAD_RTOL = 1e-10
    QUAD_LIMIT = 500

    # Overhead model measured on the Spark cluster
    MEASURED_C_TS_TASK_MS = 2.6
    MEASURED_MU_TS_TASK_PER_S = 2000.0
    MEASURED_C_PD_JOB_MS = 20.0
    MEASURED_C_PD_TASK_MS = 7.4e-3
