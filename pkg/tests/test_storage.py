import json
import os
import numpy as np
from services.simulator import run
from storage.artifacts import ArtifactStore, artifact_stem, json_default
from storage.manifest import RunManifest, config_digest

def test_artifact_stem():
    assert artifact_stem('sqfj', 50, 2500, 7) == 'sqfj_l50_k2500_seed7'

def test_json_default_handles_numpy():
    assert json.dumps({'a': np.float64(1.5), 'b': np.arange(3)}, default=json_default) == '{"a": 1.5, "b": [0, 1, 2]}'

def test_write_result_files(make_config, output_dir):
    store = ArtifactStore(output_dir)
    result = run(make_config(n_jobs=150, seed=3, record_tasks=True))
    paths = store.write_result(result)
    assert os.path.basename(paths['jobs']) == 'sm_l2_k4_seed3_jobs.csv'
    assert os.path.basename(paths['tasks']) == 'sm_l2_k4_seed3_tasks.csv'
    with open(paths['summary'], encoding='utf-8') as handle:
        summary = json.load(handle)
    assert summary['config']['seed'] == 3
    assert store.artifacts == [paths['jobs'], paths['tasks'], paths['summary']]

def test_write_result_without_tasks(make_config, output_dir):
    paths = ArtifactStore(output_dir).write_result(run(make_config(n_jobs=20)))
    assert 'tasks' not in paths

def test_config_digest_is_canonical():
    assert config_digest({'b': 1, 'a': [1, 2]}) == config_digest({'a': [1, 2], 'b': 1})
    assert config_digest({'a': 1}) != config_digest({'a': 2})

def test_manifest_written_untracked(output_dir):
    store = ArtifactStore(output_dir)
    store.write_json({'x': 1}, 'out.json')
    manifest = RunManifest.build('simulate', {'seed': 4, 'k': 8}, 4, store.artifacts)
    path = manifest.write(store)
    assert os.path.basename(path) == 'manifest_simulate.json'
    assert path not in store.artifacts
    with open(path, encoding='utf-8') as handle:
        data = json.load(handle)
    assert data['tool'] == 'tinytasks'
    assert data['config_digest'] == config_digest({'seed': 4, 'k': 8})
    assert data['artifacts'] == [store.path('out.json')]
    assert data['host']['cpu_logical'] >= 1
    assert manifest.run_id == data['config_digest'][:12]
