"""JSON state files.

Two document kinds are understood::

    {"kind": "coefficients", "n": N, "matrix": [[[re, im], ...], ...]}
    {"kind": "density", "dA": A, "dB": B, "matrix": [[[re, im], ...], ...]}

Matrices are row-major lists of rows and every entry is a ``[re, im]``
pair. Floats are written with 17 significant digits so a write/read cycle
reproduces every double exactly.
"""

from __future__ import annotations

import json
import os
from typing import NamedTuple

import numpy as np

from .errors import RelEntError


class StateFileError(RelEntError):
    """The document could not be parsed (as opposed to failing validation)."""


class StateFile(NamedTuple):
    kind: str
    matrix: np.ndarray
    d_a: int
    d_b: int


def _num(x: float) -> str:
    text = format(float(x), ".17g")
    # "-0" would parse back as the integer 0 and lose the sign
    return "-0.0" if text == "-0" else text


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    rows = (
        "[" + ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in row) + "]"
        for row in m
    )
    return "[" + ", ".join(rows) + "]"


def matrix_to_json(m) -> list:
    """Nested ``[re, im]`` lists, for embedding in reports."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def dumps_coefficients(a) -> str:
    a = np.asarray(a, dtype=complex)
    return f'{{"kind": "coefficients", "n": {a.shape[0]}, "matrix": {format_matrix(a)}}}\n'


def dumps_density(m, d_a: int, d_b: int) -> str:
    return f'{{"kind": "density", "dA": {int(d_a)}, "dB": {int(d_b)}, "matrix": {format_matrix(m)}}}\n'


def write_coefficients(path: str | os.PathLike, a) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_coefficients(a))


def write_density(path: str | os.PathLike, m, d_a: int, d_b: int) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_density(m, d_a, d_b))


def _parse_matrix(raw) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise StateFileError("'matrix' must be a non-empty list of rows")
    size = len(raw)
    out = np.empty((size, size), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != size:
            raise StateFileError(f"row {i} must have {size} entries")
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in z)
            ):
                raise StateFileError(f"entry ({i}, {j}) must be a [re, im] pair of numbers")
            out[i, j] = complex(z[0], z[1])
    return out


def _positive_int(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise StateFileError(f"'{key}' must be a positive integer")
    return v


def loads_state(text: str) -> StateFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise StateFileError("state document must be a JSON object")
    kind = doc.get("kind")
    if kind not in ("coefficients", "density"):
        raise StateFileError(f"unknown kind {kind!r}; expected 'coefficients' or 'density'")
    m = _parse_matrix(doc.get("matrix"))
    if kind == "coefficients":
        n = _positive_int(doc, "n")
        if n != m.shape[0]:
            raise StateFileError(f"'n' is {n} but matrix has {m.shape[0]} rows")
        return StateFile(kind, m, n, n)
    d_a, d_b = _positive_int(doc, "dA"), _positive_int(doc, "dB")
    if d_a * d_b != m.shape[0]:
        raise StateFileError(f"dA*dB = {d_a * d_b} but matrix has {m.shape[0]} rows")
    return StateFile(kind, m, d_a, d_b)


def load_state(path: str | os.PathLike) -> StateFile:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc.strerror}") from exc
    return loads_state(text)
