"""
Artifact persistence: output directory layout, file naming and writers.
"""
import json
import os
from typing import Any, Dict, List, Optional
import numpy as np
import pandas as pd
from config import Config
from utils.logger import logger

def json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return str(value)

def artifact_stem(model: str, l: int, k: int, seed: int) -> str:
    """File stem {model}_l{l}_k{k}_seed{seed}."""
    return f"{model}_l{l}_k{k}_seed{seed}"

class ArtifactStore:
    """Directory-backed artifact storage; remembers every path it wrote."""

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = output_dir or Config.OUTPUT_DIR
        os.makedirs(self.output_dir, exist_ok=True)
        self.artifacts: List[str] = []

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _track(self, path: str) -> str:
        if path not in self.artifacts:
            self.artifacts.append(path)
        return path

    def write_csv(self, frame: pd.DataFrame, name: str) -> str:
        """Write a table; floats keep full precision (repr) so that re-reads are exact."""
        path = self.path(name)
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return self._track(path)

    def write_json(self, data: Dict[str, Any], name: str, track: bool = True) -> str:
        path = self.path(name)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(data, handle, sort_keys=True, indent=2, default=json_default)
            handle.write('\n')
        return self._track(path) if track else path

    def write_result(self, result) -> Dict[str, str]:
        """
        Persist a SimResult: jobs CSV, tasks CSV (when recorded) and the JSON summary.

        Returns:
            Mapping of artifact kind to path
        """
        cfg = result.config
        stem = artifact_stem(cfg.model.value, cfg.l, cfg.k, cfg.seed)
        paths = {'jobs': self.write_csv(result.jobs_frame(), f'{stem}_jobs.csv')}
        tasks = result.tasks_frame()
        if tasks is not None:
            paths['tasks'] = self.write_csv(tasks, f'{stem}_tasks.csv')
        paths['summary'] = self.write_json(result.summary(), f'{stem}_summary.json')
        return paths
