import pytest
from services.overhead import OverheadParams
from services.simulator import Model, SystemConfig
from services.stochastic import Distribution

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run desk-scale acceptance tests')

def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture
def make_config():
    """SystemConfig factory with small, fast defaults (times in ms)."""
    def factory(**overrides):
        values = {
            'model': Model.SPLIT_MERGE,
            'l': 2,
            'k': 4,
            'arrival': Distribution.exponential(0.5),
            'task_execution': Distribution.exponential(4.0),
            'overhead': OverheadParams(),
            'n_jobs': 2000,
            'seed': 11,
            'warmup_jobs': 100
        }
        values.update(overrides)
        return SystemConfig(**values)
    return factory

@pytest.fixture
def output_dir(tmp_path):
    return str(tmp_path / 'out')
