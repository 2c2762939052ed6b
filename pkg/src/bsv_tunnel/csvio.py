"""Deterministic CSV output with config-hash provenance.

Every file starts with '# config_hash=<hex>' so downstream consumers can
refuse mixed-provenance inputs.  Floats are written as Python repr, the
shortest decimal that round-trips the exact double, which makes outputs
byte-comparable across runs and worker counts.
"""

from __future__ import annotations

import json
import os
import time

import numpy as np


def fmt_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, config_hash: str):
    lines = [f"# config_hash={config_hash}", ",".join(columns)]
    lines.extend(",".join(fmt_cell(c) for c in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Read back a package CSV: returns (config_hash, columns, rows of
    floats)."""
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.readline().strip()
        if not head.startswith("# config_hash="):
            raise ValueError(f"{path}: missing config_hash header")
        config_hash = head.split("=", 1)[1]
        columns = fh.readline().strip().split(",")
        rows = [[float(c) for c in line.strip().split(",")]
                for line in fh if line.strip()]
    return config_hash, columns, rows


def write_sidecar(csv_path, cfg_text: str, config_hash: str, mode: str,
                  version: str, wall_time_s: float, extra: dict | None = None):
    meta = {
        "mode": mode,
        "config_hash": config_hash,
        "version": version,
        "wall_time_s": round(wall_time_s, 3),
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "effective_config": cfg_text,
    }
    if extra:
        meta.update(extra)
    with open(str(csv_path) + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_dir(d):
    os.makedirs(d, exist_ok=True)
    return d
