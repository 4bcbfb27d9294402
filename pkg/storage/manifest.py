"""
Run manifests: what was run, with which resolved configuration, producing which files.
"""
import hashlib
import json
import platform
from dataclasses import dataclass, asdict, field
from datetime import datetime, timezone
from typing import Any, Dict, List
import psutil
from config import Config
from storage.artifacts import ArtifactStore, json_default

def config_digest(resolved_config: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form (sorted keys, no whitespace)."""
    canonical = json.dumps(resolved_config, sort_keys=True, separators=(',', ':'), default=json_default)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

def host_facts() -> Dict[str, Any]:
    memory = psutil.virtual_memory()
    return {
        'platform': platform.platform(),
        'python': platform.python_version(),
        'cpu_logical': psutil.cpu_count(logical=True),
        'cpu_physical': psutil.cpu_count(logical=False),
        'memory_total_bytes': memory.total
    }

@dataclass
class RunManifest:
    command: str
    config_digest: str
    seed: int
    resolved_config: Dict[str, Any]
    artifacts: List[str] = field(default_factory=list)
    tool_version: str = Config.TOOL_VERSION
    host: Dict[str, Any] = field(default_factory=dict)
    created_at: str = ''

    @classmethod
    def build(cls, command: str, resolved_config: Dict[str, Any], seed: int,
              artifacts: List[str]) -> 'RunManifest':
        return cls(
            command=command,
            config_digest=config_digest(resolved_config),
            seed=seed,
            resolved_config=resolved_config,
            artifacts=list(artifacts),
            host=host_facts(),
            created_at=datetime.now(timezone.utc).isoformat()
        )

    @property
    def run_id(self) -> str:
        return self.config_digest[:12]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['tool'] = Config.TOOL_NAME
        return data

    def write(self, store: ArtifactStore) -> str:
        return store.write_json(self.to_dict(), f'manifest_{self.command}.json', track=False)
