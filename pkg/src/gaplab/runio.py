"""Run manifests and deterministic CSV/JSON emission.

Numeric reports are byte-stable for identical inputs: CSV floats use 17
significant digits with '.' decimals and '\\n' line endings, JSON floats use
the shortest round-trip repr, and timestamps live only in the manifest so
reports can be compared byte-for-byte across reruns.
"""

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional


def format_float(x: float) -> str:
    """17 significant digits; round-trips any double."""
    return "%.17g" % float(x)


def format_cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        return format_float(x)
    return str(x)


def write_csv(path: str, header, rows) -> None:
    """Header row plus formatted rows, '\\n' endings, trailing newline."""
    lines = [",".join(header)]
    lines.extend(",".join(format_cell(x) for x in row) for row in rows)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _jsonify(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonify(obj), indent=2) + "\n"


def write_json(path: str, obj) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(dump_json(obj))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    """Written before any output; finalized with the end timestamp.

    A crashed run therefore leaves a manifest whose ended_at is null.
    Timestamps never appear in the numeric reports.
    """

    command: str
    params: dict
    seed: int
    version: str
    out_dir: str
    started_at: str = ""
    ended_at: Optional[str] = None
    outputs: list = field(default_factory=list)
    summary: Optional[dict] = None

    @property
    def path(self) -> str:
        return os.path.join(self.out_dir, "manifest.json")

    def start(self) -> "RunManifest":
        os.makedirs(self.out_dir, exist_ok=True)
        self.started_at = _now()
        self._write()
        return self

    def record_output(self, path: str) -> str:
        self.outputs.append(os.path.basename(path))
        return path

    def finish(self, summary: Optional[dict] = None) -> None:
        self.ended_at = _now()
        self.summary = summary
        self._write()

    def _write(self) -> None:
        write_json(
            self.path,
            {
                "command": self.command,
                "params": self.params,
                "seed": self.seed,
                "version": self.version,
                "started_at": self.started_at,
                "ended_at": self.ended_at,
                "outputs": self.outputs,
                "summary": self.summary,
            },
        )


def read_config(path: str) -> dict:
    """Flat `key = value` file with '#' comments; keys use flag spelling."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values
