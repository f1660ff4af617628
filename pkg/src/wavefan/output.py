"""Deterministic CSV and manifest writers.

Floats are rendered with shortest round-trip repr so identical runs produce
byte-identical bodies; manifests are sorted-key JSON without timestamps.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, Sequence

import numpy as np


def format_value(v) -> str:
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return str(v)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):  # before int: bool is an int subtype
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def write_manifest(path: str, payload: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")


def solution_rows(solution, components=None):
    """Rows y, u_1..u_N [, v_1..v_N], a_1..a_N for one profile."""
    y = solution.mesh.nodes
    blocks = [y[:, None], solution.states]
    if solution.aux_states is not None:
        blocks.append(solution.aux_states)
    if components is not None:
        blocks.append(components)
    return np.concatenate(blocks, axis=1)


def solution_header(dimension, with_aux=False, with_components=True):
    header = ["y"] + [f"u_{i + 1}" for i in range(dimension)]
    if with_aux:
        header += [f"v_{i + 1}" for i in range(dimension)]
    if with_components:
        header += [f"a_{i + 1}" for i in range(dimension)]
    return header
