"""JSON interchange for states and channels.

A state document is ``{"dim": d, "matrix": M}`` and a channel document is
``{"dim": d, "kraus": [M, ...], "convention": "row_sum" | "column_sum"}``,
where each matrix ``M`` is a row-major nested array of ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .linalg import DEFAULT_TOL
from .objects import Convention, DensityMatrix, KrausChannel, validate_channel, validate_density

__all__ = [
    "load_channel",
    "load_state",
    "matrix_from_pairs",
    "matrix_to_pairs",
    "save_channel",
    "save_state",
    "write_text_atomic",
]


def matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_pairs(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix must be a nested array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def write_text_atomic(path, text: str) -> None:
    """Write via a temporary sibling and rename, so readers never see partials."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def save_state(path, state: DensityMatrix) -> None:
    doc = {"dim": state.dim, "matrix": matrix_to_pairs(state.rho)}
    write_text_atomic(path, json.dumps(doc, indent=1) + "\n")


def load_state(path, tol: float = DEFAULT_TOL) -> DensityMatrix:
    doc = json.loads(Path(path).read_text())
    m = matrix_from_pairs(doc["matrix"])
    if m.shape != (doc["dim"], doc["dim"]):
        raise ValueError(f"declared dim {doc['dim']} does not match matrix shape {m.shape}")
    return validate_density(m, tol=tol)


def save_channel(path, channel: KrausChannel) -> None:
    doc = {
        "dim": channel.dim,
        "kraus": [matrix_to_pairs(k) for k in channel.operators],
        "convention": channel.convention.value,
    }
    write_text_atomic(path, json.dumps(doc, indent=1) + "\n")


def load_channel(path, tol: float = DEFAULT_TOL) -> KrausChannel:
    doc = json.loads(Path(path).read_text())
    ops = [matrix_from_pairs(k) for k in doc["kraus"]]
    for k in ops:
        if k.shape != (doc["dim"], doc["dim"]):
            raise ValueError(f"declared dim {doc['dim']} does not match a Kraus shape {k.shape}")
    return validate_channel(ops, convention=Convention(doc["convention"]), tol=tol)
