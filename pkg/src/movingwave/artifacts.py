"""Deterministic CSV/JSON artifact writers shared by the CLI subcommands."""
from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Iterable

import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def write_csv(path: str, header: list[str], rows: Iterable) -> None:
    """Write rows with floats rendered to 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def config_digest(config: dict) -> str:
    """SHA-256 of the canonical JSON form of the run configuration."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def write_metadata(path: str, config: dict, **extra) -> None:
    """Sidecar JSON with the run configuration, its digest and extras."""
    from . import __version__

    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, (np.floating,)):
            return float(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return obj

    payload = {
        "version": __version__,
        "config": clean(config),
        "config_sha256": config_digest(clean(config)),
    }
    payload.update(clean(extra))
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def sibling(path: str, suffix: str) -> str:
    base, _ = os.path.splitext(path)
    return base + suffix
