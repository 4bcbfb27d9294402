"""
End-to-end checks of bounds against simulation, and desk-scale runs (--runslow).
"""
import math
import pytest
from services.bounds import analytical_params, bound_for_model
from services.overhead import OverheadParams
from services.simulator import Model, SystemConfig, run
from services.stochastic import Distribution, exceedance, quantile

def cluster_config(model, k, overhead=OverheadParams(), n_jobs=20000, l=50):
    # λ = 0.5 s⁻¹ and μ = k/l s⁻¹, in ms
    return SystemConfig(model=model, l=l, k=k, arrival=Distribution.exponential(0.5e-3),
                        task_execution=Distribution.exponential(k / l * 1e-3), overhead=overhead,
                        n_jobs=n_jobs, seed=7, warmup_jobs=1000)

@pytest.mark.parametrize('model,in_sequence', [(Model.SPLIT_MERGE, False), (Model.SINGLE_QUEUE_FORK_JOIN, True)])
@pytest.mark.parametrize('k', [10, 40])
@pytest.mark.parametrize('epsilon', [1e-2, 1e-3])
def test_bound_holds_for_simulated_sojourn(make_config, model, in_sequence, k, epsilon):
    config = make_config(model=model, l=10, k=k, task_execution=Distribution.exponential(k / 10),
                         in_sequence_departures=in_sequence, n_jobs=30000, warmup_jobs=1000).with_utilization(0.5)
    params, _ = analytical_params(config)
    bound = bound_for_model(model, params, epsilon)
    assert bound.feasible
    sample = run(config).sojourn_sample()
    assert exceedance(sample, bound.tau) <= epsilon + 3 * math.sqrt(epsilon / len(sample))

def test_ideal_partition_bound_holds(make_config):
    config = make_config(model=Model.IDEAL_PARTITION, l=4, k=32, task_execution=Distribution.exponential(16.0),
                         n_jobs=20000)
    params, _ = analytical_params(config)
    bound = bound_for_model(config.model, params, 1e-2)
    assert exceedance(run(config).sojourn_sample(), bound.tau) <= 1e-2

def test_conventional_fork_join_bound_holds(make_config):
    config = make_config(model=Model.CONVENTIONAL_FORK_JOIN, l=8, k=8, arrival=Distribution.exponential(0.2),
                         task_execution=Distribution.exponential(1.0), n_jobs=20000)
    params, _ = analytical_params(config)
    bound = bound_for_model(config.model, params, 1e-2)
    assert exceedance(run(config).sojourn_sample(), bound.tau) <= 1e-2

@pytest.mark.slow
def test_tiny_tasks_shrink_split_merge_tail():
    tails = [quantile(run(cluster_config(Model.SPLIT_MERGE, k)).sojourn_sample(), 0.99) for k in (200, 1000)]
    assert tails[1] < tails[0]

@pytest.mark.slow
def test_overhead_makes_very_tiny_tasks_slower():
    overhead = OverheadParams.measured()
    tails = [quantile(run(cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, k, overhead, n_jobs=5000)).sojourn_sample(), 0.99)
             for k in (1000, 5000)]
    assert tails[1] > tails[0]

@pytest.mark.slow
def test_overhead_approximation_tracks_simulation():
    config = cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, 1000, OverheadParams.measured(), n_jobs=10000)
    params, _ = analytical_params(config)
    approx = bound_for_model(config.model, params, 1e-2)
    simulated = quantile(run(config).sojourn_sample(), 0.99)
    assert approx.approximation
    assert 0.5 * simulated < approx.tau < 3.0 * simulated

@pytest.mark.slow
def test_split_merge_mean_job_service_matches_closed_form():
    result = run(cluster_config(Model.SPLIT_MERGE, 200, n_jobs=30000))
    expected_ms = 1000 * (4 + sum(1 / i for i in range(2, 51))) / 4
    assert result.job_service.mean() == pytest.approx(expected_ms, rel=0.01)

@pytest.mark.slow
def test_split_merge_big_tasks_stability_limit():
    from services.stability import max_stable_utilization
    config = cluster_config(Model.SPLIT_MERGE, 10, l=10)
    assert max_stable_utilization(config) == pytest.approx(0.341417, abs=0.05)

@pytest.mark.slow
def test_independent_seeds_agree():
    from dataclasses import replace
    from services.traces import compare_traces
    config = cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, 100, n_jobs=100000)
    comparison = compare_traces(run(config), run(replace(config, seed=8)))
    assert comparison.max_deviation < 0.02

@pytest.mark.slow
def test_tiny_tasks_shorten_fork_join_tail_under_overhead():
    overhead = OverheadParams.measured()
    tails = {k: quantile(run(cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, k, overhead, n_jobs=30000)).sojourn_sample(), 0.99)
             for k in (50, 100, 600)}
    assert 1 - tails[100] / tails[50] == pytest.approx(0.30, abs=0.10)
    assert 1 - tails[600] / tails[50] == pytest.approx(0.47, abs=0.10)

OVERHEAD_K_VALUES = (50, 100, 200, 400, 800, 1600, 3200)

def has_interior_minimum(values):
    return min(values[1:-1]) < min(values[0], values[-1])

def test_overhead_approximation_has_interior_minimum_in_k():
    taus = []
    for k in OVERHEAD_K_VALUES:
        config = cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, k, OverheadParams.measured())
        params, _ = analytical_params(config)
        result = bound_for_model(config.model, params, 1e-2)
        taus.append(result.tau if result.feasible else math.inf)
    assert has_interior_minimum(taus)

@pytest.mark.slow
def test_simulated_tail_under_overhead_has_interior_minimum_in_k():
    overhead = OverheadParams.measured()
    tails = [quantile(run(cluster_config(Model.SINGLE_QUEUE_FORK_JOIN, k, overhead, n_jobs=10000)).sojourn_sample(), 0.99)
             for k in OVERHEAD_K_VALUES]
    assert has_interior_minimum(tails)

@pytest.mark.slow
def test_split_merge_stability_under_overhead_peaks_at_interior_k():
    from services.stability import stability_region_curve
    base = cluster_config(Model.SPLIT_MERGE, 50, OverheadParams.measured())
    curve = stability_region_curve(base, [50, 500, 2000, 10000], n_jobs=10000)
    load = curve['rho_max_exec'].tolist()
    assert max(load[1:-1]) > max(load[0], load[-1])
