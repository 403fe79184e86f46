"""Run manifests: what went in, what came out, and a hash of the effective config."""
from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(config: dict[str, Any]) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    started: str = field(default_factory=_now)
    finished: str | None = None

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: str | Path, root: str | Path) -> None:
        self.outputs[str(Path(path).relative_to(root))] = sha256_file(path)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool": "paintdrone",
            "version": __version__,
            "command": self.command,
            "config_hash": config_hash(self.config),
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "results": self.results,
            "started": self.started,
            "finished": self.finished,
        }

    def write(self, path: str | Path) -> Path:
        self.finished = _now()
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n",
                        encoding="utf-8")
        return path
