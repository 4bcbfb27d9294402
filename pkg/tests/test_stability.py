import math
import pytest
from services.envelopes import stability_tiny
from services.erlang import stability_big
from services.overhead import OverheadParams
from services.simulator import Model
from services.stability import (
    STABILITY_CURVE_COLUMNS,
    isotonic_cleanup,
    max_stable_utilization,
    stability_formula_table,
    stability_region_curve,
    stability_scan
)
from services.stochastic import Distribution
from utils.concurrency import map_in_pool
from utils.validators import ValidationError

@pytest.mark.parametrize('raw,cleaned', [
    ([True, True, False, True, False, False], [True, True, False, False, False, False]),
    ([False, True, True], [True, True, True]),
    ([True, False], [True, False]),
    ([], [])
])
def test_isotonic_cleanup(raw, cleaned):
    assert isotonic_cleanup(raw) == cleaned

def test_formula_table():
    table = stability_formula_table([2, 50], [1, 4])
    assert len(table) == 4
    first = table.iloc[0]
    assert first['rho_max_tiny'] == pytest.approx(2 / 3)
    assert first['rho_max_big'] == pytest.approx(2 / 3)
    assert (table['rho_max_tiny'] >= table['rho_max_big'] - 1e-12).all()

def test_scan_separates_light_and_heavy_load(make_config):
    base = make_config(model=Model.SINGLE_QUEUE_FORK_JOIN)
    result = stability_scan(base, [1.5, 0.3], n_jobs=4000)
    assert result == [(0.3, True), (1.5, False)]

def test_scan_rejects_empty_grid(make_config):
    with pytest.raises(ValidationError):
        stability_scan(make_config(), [])

def test_scan_in_worker_processes_keeps_order(make_config):
    base = make_config(model=Model.IDEAL_PARTITION)
    assert [u for u, _ in stability_scan(base, [0.5, 0.2, 0.3], n_jobs=500, threads=2)] == [0.2, 0.3, 0.5]

def test_map_in_pool_preserves_input_order():
    assert map_in_pool(math.sqrt, [16.0, 1.0, 9.0, 4.0], threads=3) == [4.0, 1.0, 3.0, 2.0]
    assert map_in_pool(math.sqrt, [4.0], threads=8) == [2.0]

def test_saturated_bracket_edges(make_config):
    base = make_config(model=Model.SINGLE_QUEUE_FORK_JOIN)
    assert max_stable_utilization(base, bracket=(1.4, 1.6), n_jobs=3000) == 1.4
    assert max_stable_utilization(base, bracket=(0.1, 0.2), n_jobs=3000) == 0.2

def test_region_curve_grows_with_tinyfication(make_config):
    base = make_config(l=2, k=2, task_execution=Distribution.exponential(1.0))
    curve = stability_region_curve(base, [2, 8], resolution=0.05, n_jobs=4000)
    assert list(curve.columns) == STABILITY_CURVE_COLUMNS
    assert curve['kappa'].tolist() == [1.0, 4.0]
    assert curve['rho_max_tiny'].tolist() == pytest.approx([stability_tiny(2, 1.0), stability_tiny(2, 4.0)])
    assert curve['rho_max_sim'].iloc[1] >= curve['rho_max_sim'].iloc[0]
    assert curve['rho_max_exec'].tolist() == pytest.approx(curve['rho_max_sim'].tolist())

def test_region_curve_exec_load_excludes_task_overhead(make_config):
    base = make_config(l=2, k=2, task_execution=Distribution.exponential(1.0),
                       overhead=OverheadParams(1.0, 1.0, 0.0, 0.0))
    curve = stability_region_curve(base, [2], resolution=0.2, n_jobs=500)
    # E[E] = 1, E[Q] = 1 + 1 + 1
    assert curve['rho_max_exec'].iloc[0] == pytest.approx(curve['rho_max_sim'].iloc[0] / 3)

def test_region_curve_without_analytical_model(make_config):
    base = make_config(model=Model.CONVENTIONAL_FORK_JOIN, l=2, k=2)
    curve = stability_region_curve(base, [2], resolution=0.2, n_jobs=500)
    assert curve['rho_max_tiny'].isna().all()

@pytest.mark.slow
def test_split_merge_simulated_limit_matches_formula(make_config):
    base = make_config(l=2, k=2, task_execution=Distribution.exponential(1.0))
    assert max_stable_utilization(base, n_jobs=20000) == pytest.approx(2 / 3, abs=0.08)

@pytest.mark.slow
@pytest.mark.parametrize('k', [50, 200, 2000])
def test_split_merge_tiny_tasks_limit_matches_formula(make_config, k):
    base = make_config(l=50, k=k, task_execution=Distribution.exponential(k / 50), warmup_jobs=1000)
    assert max_stable_utilization(base) == pytest.approx(stability_tiny(50, k / 50), abs=0.03)

@pytest.mark.slow
@pytest.mark.parametrize('l', [10, 50])
def test_split_merge_big_tasks_limit_matches_formula(make_config, l):
    base = make_config(l=l, k=l, task_execution=Distribution.erlang(20, 20.0), warmup_jobs=1000)
    assert max_stable_utilization(base) == pytest.approx(stability_big(l, 20), abs=0.03)
