import numpy as np
import pandas as pd
import pytest
from services.overhead_fit import fit_overhead, fit_pre_departure, fit_task_overhead
from services.overhead import OverheadParams
from services.simulator import Model, run
from services.stochastic import Distribution
from services.traces import TraceDataset
from utils.validators import ValidationError

def traced_run(make_config, k, n_jobs):
    config = make_config(model=Model.SINGLE_QUEUE_FORK_JOIN, l=10, k=k, n_jobs=n_jobs, record_tasks=True,
                         arrival=Distribution.exponential(0.001), task_execution=Distribution.exponential(10.0),
                         overhead=OverheadParams.measured())
    return TraceDataset.from_result(run(config), f'k{k}')

def test_recovers_overhead_model_from_simulated_traces(make_config):
    dataset = TraceDataset.concat([traced_run(make_config, 100, 400), traced_run(make_config, 400, 200)])
    fit = fit_overhead(dataset)
    assert fit.c_ts_task == pytest.approx(2.6, abs=0.02)
    assert fit.mu_ts_task == pytest.approx(2.0, rel=0.05)
    assert fit.c_pd_job == pytest.approx(20.0, abs=1e-6)
    assert fit.c_pd_task == pytest.approx(7.4e-3, rel=1e-6)
    assert not fit.single_k
    assert fit.n_tasks == 100 * 400 + 400 * 200
    assert fit.to_overhead_params().c_pd_job == fit.c_pd_job

def test_single_k_trace_flags_undetermined_slope(make_config):
    fit = fit_overhead(traced_run(make_config, 50, 100))
    assert fit.single_k
    assert fit.c_pd_task == 0.0
    assert fit.c_pd_job == pytest.approx(20.0 + 50 * 7.4e-3)
    assert fit.to_dict()['single_k_warning'] is True

def test_fit_task_overhead_recovers_shifted_exponential():
    rng = np.random.default_rng(3)
    c, mu = fit_task_overhead(2.6 + rng.exponential(0.5, size=200000))
    assert c == pytest.approx(2.6, abs=0.1)
    assert mu == pytest.approx(2.0, rel=0.05)

def test_fit_task_overhead_constant_only():
    c, mu = fit_task_overhead(np.full(100, 1.5))
    assert (c, mu) == (1.5, 0.0)

def test_fit_pre_departure_exact_line():
    k = np.array([10, 20, 40, 80])
    intercept, slope, single = fit_pre_departure(k, 5.0 + 0.25 * k)
    assert intercept == pytest.approx(5.0)
    assert slope == pytest.approx(0.25)
    assert not single

def test_parameters_never_negative():
    tasks = pd.DataFrame({'job': [1, 1, 2, 2, 2], 'overhead_ms': [0.0, 0.0, 0.0, 0.0, 0.0]})
    jobs = pd.DataFrame({'job': [1, 2], 'last_finish_ms': [1.0, 1.0], 'departure_ms': [2.0, 1.0]})
    fit = fit_overhead(tasks, jobs)
    assert fit.c_pd_task == 0.0
    assert fit.c_pd_job >= 0.0
    assert fit.mean_task_overhead == 0.0

def test_empty_tables_rejected():
    with pytest.raises(ValidationError):
        fit_overhead(pd.DataFrame(columns=['job', 'overhead_ms']), pd.DataFrame(columns=['job']))
    tasks = pd.DataFrame({'job': [9], 'overhead_ms': [1.0]})
    jobs = pd.DataFrame({'job': [1], 'last_finish_ms': [1.0], 'departure_ms': [2.0]})
    with pytest.raises(ValidationError):
        fit_overhead(tasks, jobs)
