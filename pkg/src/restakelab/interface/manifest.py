"""Run manifests embedded in every emitted artifact.

Artifacts must be byte-identical for identical inputs, so the manifest
timestamp is not wall-clock time: it honors SOURCE_DATE_EPOCH when set (the
reproducible-builds convention) and otherwise pins the Unix epoch.  Input
files are identified by content hash, making the manifest a complete
fingerprint of the run.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import os
from dataclasses import dataclass
from pathlib import Path

from .. import __version__


def _deterministic_timestamp() -> str:
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return dt.datetime.fromtimestamp(epoch, dt.timezone.utc).strftime(
        "%Y-%m-%dT%H:%M:%SZ"
    )


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_paths: tuple[str, ...]
    seeds: dict[str, int]
    engine_version: str
    input_hashes: dict[str, str]
    timestamp: str

    @classmethod
    def build(
        cls,
        command: str,
        config_paths: list[str | Path] | None = None,
        seeds: dict[str, int] | None = None,
    ) -> "RunManifest":
        paths = [Path(p) for p in (config_paths or [])]
        return cls(
            command=command,
            config_paths=tuple(str(p) for p in paths),
            seeds=dict(seeds or {}),
            engine_version=__version__,
            input_hashes={str(p): _sha256_file(p) for p in paths if p.is_file()},
            timestamp=_deterministic_timestamp(),
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_paths": list(self.config_paths),
            "seeds": self.seeds,
            "engine_version": self.engine_version,
            "input_hashes": self.input_hashes,
            "timestamp": self.timestamp,
        }

    def header_lines(self) -> list[str]:
        hashes = ", ".join(f"{Path(p).name}={h[:12]}" for p, h in self.input_hashes.items())
        seeds = ", ".join(f"{k}={v}" for k, v in self.seeds.items()) or "none"
        return [
            f"# run: {self.command}",
            f"# engine: restakelab {self.engine_version}   seeds: {seeds}",
            f"# inputs: {hashes or 'none'}   generated: {self.timestamp}",
        ]
