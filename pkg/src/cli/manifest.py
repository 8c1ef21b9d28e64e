"""
Run manifest: the one file of a run that carries timestamps.

manifest.json
  config_hash   sha256 of the config file bytes
  seed          resolved seed
  tool_version  homflow version
  started       ISO-8601 UTC
  finished      ISO-8601 UTC, null while the run is incomplete
  outputs       file names relative to the run directory
  complete      false when the run was interrupted or failed
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from src import __version__
from src.errors import ConfigError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    tool_version: str = __version__
    started: str = field(default_factory=utc_now)
    finished: Optional[str] = None
    outputs: List[str] = field(default_factory=list)
    complete: bool = False
    experiment: Optional[str] = None

    def finish(self, outputs: List[str], complete: bool = True) -> None:
        self.outputs = sorted(os.path.basename(p) for p in outputs)
        self.finished = utc_now()
        self.complete = complete

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "RunManifest":
        try:
            return cls(
                config_hash=str(data["config_hash"]),
                seed=int(data["seed"]),
                tool_version=str(data.get("tool_version", "")),
                started=str(data.get("started", "")),
                finished=data.get("finished"),
                outputs=list(data.get("outputs", [])),
                complete=bool(data.get("complete", False)),
                experiment=data.get("experiment"),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Malformed run manifest: {str(e)}")

    def write(self, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, MANIFEST_NAME)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n")
        logger.info(f"Wrote manifest {path} (complete={self.complete})")
        return path


def read_manifest(run_dir: str) -> RunManifest:
    with open(os.path.join(run_dir, MANIFEST_NAME), encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Malformed run manifest in {run_dir}: {str(e)}")
    return RunManifest.from_json(data)
