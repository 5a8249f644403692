"""Run configuration files and reproducibility manifests.

Config files are line-oriented ``key = value`` text; ``#`` starts a
comment. Every stage writes a ``<output>.manifest.json`` recording the
config snapshot, SHA-256 checksums of inputs and outputs, wall-clock, and
component versions: re-running a stage with identical inputs must
reproduce identical artifact checksums.
"""

from __future__ import annotations

import hashlib
import json
import platform
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ParseError


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError("expected key = value", lineno)
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class ManifestWriter:
    def __init__(self, stage: str, config: dict):
        self.stage = stage
        self.config = config
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.started = time.time()

    def add_input(self, path: str | Path) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: str | Path) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def write(self, path: str | Path) -> dict:
        doc = {
            "stage": self.stage,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started_unix": self.started,
            "elapsed_s": time.time() - self.started,
            "versions": {
                "tempolm": __version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
            },
        }
        Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
        return doc
