"""Flat-file writers. Floats are written with ``repr`` so files round-trip
bit-exactly, and nothing time-dependent goes into data files."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

TRAJECTORY_HEADER = ("n", "t", "k", "x", "v", "e", "edot", "d1", "d2", "in_window")


def _num(value) -> str:
    return repr(float(value))


def trajectory_rows(traj, in_window: np.ndarray):
    """Long-format rows, one per (step, vehicle); e and edot are blank for k = 0."""
    e, edot = traj.e, traj.edot
    for i, n in enumerate(traj.steps):
        t = _num(n * traj.dt)
        for k in range(traj.N + 1):
            yield (
                str(int(n)), t, str(k), _num(traj.x[i, k]), _num(traj.v[i, k]),
                _num(e[i, k - 1]) if k else "", _num(edot[i, k - 1]) if k else "",
                _num(traj.d1[i, k]), _num(traj.d2[i, k]), "true" if in_window[i, k] else "false",
            )


def write_trajectory_csv(path, traj, in_window: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        writer.writerows(trajectory_rows(traj, in_window))
    return path


def write_series_csv(path, header, columns) -> Path:
    """Write equal-length columns; integer columns stay integers."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = [np.asarray(c) for c in columns]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow(
                str(int(v)) if np.issubdtype(type(v), np.integer) else
                ("true" if v else "false") if isinstance(v, (bool, np.bool_)) else _num(v)
                for v in row
            )
    return path


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, range):
        return [obj.start, obj.stop]
    return obj


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path
