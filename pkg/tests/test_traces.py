import pandas as pd
import pytest
from services.simulator import JOB_CSV_COLUMNS, TASK_CSV_COLUMNS, Model, run
from services.traces import SchemaError, TraceDataset, compare_traces, ingest_trace
from utils.validators import ValidationError

def write_jobs(path, rows):
    pd.DataFrame(rows, columns=JOB_CSV_COLUMNS).to_csv(path, index=False)

JOBS = [
    # job, arrival, first_start, last_finish, departure, sojourn, waiting, workload, service
    [1, 0.0, 0.0, 4.0, 5.0, 5.0, 0.0, 8.0, 4.0],
    [2, 1.0, 4.0, 7.0, 6.5, 5.5, 3.0, 6.0, 3.0],
    [3, 2.0, 7.0, 9.0, 9.5, 7.5, 5.0, 4.0, 2.0]
]

def test_ingest_rejects_inconsistent_rows(tmp_path):
    path = tmp_path / 'run_jobs.csv'
    write_jobs(path, JOBS)
    dataset = ingest_trace(str(tmp_path))
    assert dataset.report.jobs_read == 3
    assert dataset.report.jobs_accepted == 2
    assert dataset.report.rejected == [{'table': 'jobs', 'row': 2, 'reason': 'departure before last finish'}]
    assert dataset.jobs['job'].tolist() == [1, 3]
    assert dataset.tasks is None

def test_ingest_tasks_of_rejected_jobs_are_dropped(tmp_path):
    jobs_path = tmp_path / 'jobs.csv'
    tasks_path = tmp_path / 'tasks.csv'
    write_jobs(jobs_path, JOBS)
    pd.DataFrame([
        [1, 1, 0.0, 3.0, 1.0, 4.0, 4.0],
        [2, 1, 4.0, 2.0, 1.0, 3.0, 7.0],
        [3, 1, 7.0, -1.0, 1.0, 2.0, 9.0]
    ], columns=TASK_CSV_COLUMNS).to_csv(tasks_path, index=False)
    dataset = ingest_trace(str(jobs_path), tasks_path=str(tasks_path), source_label='spark')
    assert dataset.source_label == 'spark'
    assert dataset.report.tasks_accepted == 1
    reasons = {(r['table'], r['row']): r['reason'] for r in dataset.report.rejected}
    assert reasons[('tasks', 2)] == 'unknown job'
    assert reasons[('tasks', 3)] == 'negative duration'
    assert dataset.task_records[0].execution == 3.0

def test_missing_columns_raise_schema_error(tmp_path):
    path = tmp_path / 'jobs.csv'
    pd.DataFrame({'job': [1], 'arrival_ms': [0.0]}).to_csv(path, index=False)
    with pytest.raises(SchemaError) as excinfo:
        ingest_trace(str(path))
    assert 'departure_ms' in excinfo.value.missing

def test_ingest_errors(tmp_path):
    with pytest.raises(ValidationError):
        ingest_trace(str(tmp_path), format='parquet')
    with pytest.raises(ValidationError):
        ingest_trace(str(tmp_path))

def test_exported_run_ingests_cleanly(make_config, tmp_path):
    result = run(make_config(n_jobs=200, record_tasks=True))
    result.jobs_frame().to_csv(tmp_path / 'sim_jobs.csv', index=False)
    result.tasks_frame().to_csv(tmp_path / 'sim_tasks.csv', index=False)
    dataset = ingest_trace(str(tmp_path))
    assert dataset.report.rejected == []
    assert dataset.report.tasks_accepted == 800
    assert dataset.sojourn_sample().values.tolist() == sorted(result.sojourn.tolist())
    assert dataset.job_records[5].departure == result.jobs[5].departure

def test_concat_reindexes_jobs(make_config):
    a = TraceDataset.from_result(run(make_config(n_jobs=10, record_tasks=True)), 'a')
    b = TraceDataset.from_result(run(make_config(n_jobs=5, k=8, record_tasks=True)), 'b')
    both = TraceDataset.concat([a, b])
    assert both.source_label == 'a+b'
    assert both.jobs['job'].tolist() == list(range(1, 16))
    assert both.tasks.groupby('job').size().loc[11] == 8
    with pytest.raises(ValidationError):
        TraceDataset.concat([])

def test_compare_identical_traces(make_config):
    dataset = TraceDataset.from_result(run(make_config(n_jobs=300)))
    comparison = compare_traces(dataset, dataset, grid_size=64)
    assert comparison.max_deviation == 0.0
    assert all(v['delta_ms'] == 0.0 for v in comparison.quantile_deltas.values())
    assert len(comparison.pp_frame()) == 64

def test_compare_split_merge_against_single_queue(make_config):
    sm = run(make_config(model=Model.SPLIT_MERGE).with_utilization(0.5))
    sqfj = run(make_config(model=Model.SINGLE_QUEUE_FORK_JOIN).with_utilization(0.5))
    comparison = compare_traces(sqfj, sm)
    frame = comparison.deltas_frame()
    assert list(frame.columns) == ['quantile', 'a_ms', 'b_ms', 'delta_ms']
    assert (frame['delta_ms'] >= 0).all()
    assert comparison.max_deviation > 0

def test_missing_exec_column_is_named(tmp_path):
    jobs_path = tmp_path / 'jobs.csv'
    tasks_path = tmp_path / 'tasks.csv'
    write_jobs(jobs_path, JOBS[:1])
    pd.DataFrame({'job': [1], 'task': [1], 'start_ms': [0.0]}).to_csv(tasks_path, index=False)
    with pytest.raises(SchemaError) as excinfo:
        ingest_trace(str(jobs_path), tasks_path=str(tasks_path))
    assert 'exec_ms' in excinfo.value.missing
