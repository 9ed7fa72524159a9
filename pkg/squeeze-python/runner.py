"""
Execution plumbing: the ordered worker pool, the run manifest and the
artifact writers.

Cells run on a thread pool executor and come back in input order, so the
order of every output is the order of the input no matter which worker
finishes first.
"""

import csv
import hashlib
import json
import logging
import math
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import psutil
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from config import STDOUT, canonical_json, config_hash

log = logging.getLogger(__name__)

TOOL = "squeezelight"
VERSION = "1.0.0"


def default_workers():
    return psutil.cpu_count(logical=True) or 1


class OrderedPool:
    """
    Worker pool around `concurrent.futures.ThreadPoolExecutor` whose `map`
    returns a list in input order.

    With one worker everything runs inline. The first failing cell in input
    order is re-raised once the executor has shut down.
    """

    def __init__(self, workers=None, progress=None, description="Computing"):
        self.workers = max(1, int(workers or default_workers()))
        self.progress = progress
        self.description = description

    def map(self, func, items):
        items = list(items)
        task = None
        if self.progress is not None:
            task = self.progress.add_task(self.description, total=len(items))

        def cell(item):
            try:
                return func(item)
            finally:
                if task is not None:
                    self.progress.update(task, advance=1)

        if self.workers == 1 or len(items) <= 1:
            return [cell(item) for item in items]
        with ThreadPoolExecutor(max_workers=min(self.workers, len(items)), thread_name_prefix=TOOL) as executor:
            return list(executor.map(cell, items))


def progress_bar(console):
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )


# --- Manifest ---

def host_snapshot():
    return {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "cpu_count": psutil.cpu_count(logical=True),
        "memory_percent": psutil.virtual_memory().percent,
    }


def file_digest(path):
    """SHA-256 of a file, read in chunks."""
    sha256_hash = hashlib.sha256()
    with open(path, "rb") as f:
        for byte_block in iter(lambda: f.read(4096), b""):
            sha256_hash.update(byte_block)
    return sha256_hash.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    config_hash: str
    tool: str = TOOL
    version: str = VERSION
    started: float = field(default_factory=time.time)
    wall_clock: float = 0.0
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    workers: int = 1
    host: dict = field(default_factory=host_snapshot)

    @classmethod
    def for_config(cls, command, cfg, workers=1):
        return cls(command=command, config=json.loads(canonical_json(cfg)), config_hash=config_hash(cfg),
                   workers=workers)

    def timed(self, name, func, *args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - start

    def warn(self, message):
        self.warnings.append(message)

    def record_output(self, path):
        if path != STDOUT:
            self.outputs[path] = file_digest(path)

    def finish(self):
        self.wall_clock = time.time() - self.started
        return self

    def to_dict(self):
        return {
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "config_hash": self.config_hash,
            "config": self.config,
            "started": self.started,
            "wall_clock": self.wall_clock,
            "timings": self.timings,
            "warnings": self.warnings,
            "outputs": self.outputs,
            "workers": self.workers,
            "host": self.host,
        }

    def write(self, artifact_path):
        """Write <artifact>.manifest.json next to the artifact (or to stderr for stdout runs)."""
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        if artifact_path == STDOUT:
            sys.stderr.write(text)
            return None
        path = manifest_path(artifact_path)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return path


def manifest_path(artifact_path):
    return f"{artifact_path}.manifest.json"


class ManifestWarnings(logging.Handler):
    """Copies WARNING records of the engine loggers into a manifest."""

    def __init__(self, manifest):
        super().__init__(level=logging.WARNING)
        self.manifest = manifest

    def emit(self, record):
        self.manifest.warn(f"{record.name}: {record.getMessage()}")


# --- Writers ---

def format_value(value):
    """Shortest round-trip text for floats; None and nan become empty fields."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(float(value))
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def _open_target(path):
    if path == STDOUT:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def write_csv(path, header, rows):
    target, owned = _open_target(path)
    try:
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    finally:
        if owned:
            target.close()
    return path


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "tolist"):
        return _jsonable(value.tolist())
    return value


def write_json(path, payload):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
    target, owned = _open_target(path)
    try:
        target.write(text)
    finally:
        if owned:
            target.close()
    return path


def write_records(path, fmt, header, rows):
    """CSV with a header row, or JSON as a list of objects keyed by the header."""
    rows = list(rows)
    if fmt == "json":
        return write_json(path, [dict(zip(header, row)) for row in rows])
    return write_csv(path, header, rows)
