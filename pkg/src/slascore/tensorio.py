"""Bit-exact tensor interchange files.

A tensor file is one UTF-8 JSON header line terminated by ``\\n`` followed
by the raw payload:

    {"name": <string>, "dtype": "f32", "shape": [<ints>],
     "order": "row-major", "endian": "little"}\\n
    <product(shape) * 4 bytes of IEEE-754 binary32, little-endian>

Writers emit the header keys in exactly the order above with compact
separators, so identical tensors serialize to identical bytes in every
implementation of the format. Readers are strict: any structural
deviation raises :class:`TensorIntegrityError`.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import TensorIntegrityError

_HEADER_KEYS = ("name", "dtype", "shape", "order", "endian")


def write_tensor(path: str | Path, name: str, values: np.ndarray) -> None:
    """Serialize ``values`` as little-endian float32 under ``name``."""
    arr = np.ascontiguousarray(values, dtype="<f4")
    header = {
        "name": name,
        "dtype": "f32",
        "shape": list(arr.shape),
        "order": "row-major",
        "endian": "little",
    }
    line = json.dumps(header, separators=(",", ":")) + "\n"
    with open(path, "wb") as fh:
        fh.write(line.encode("utf-8"))
        fh.write(arr.tobytes())


def read_tensor(path: str | Path) -> tuple[str, np.ndarray]:
    """Read one tensor file, returning ``(name, float32 array)``.

    Raises :class:`TensorIntegrityError` for malformed headers, payload
    length mismatches, or trailing bytes.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise TensorIntegrityError(f"{path}: missing header line terminator")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorIntegrityError(f"{path}: unparseable header: {exc}") from exc
    if not isinstance(header, dict):
        raise TensorIntegrityError(f"{path}: header is not a JSON object")
    if set(header) != set(_HEADER_KEYS):
        raise TensorIntegrityError(
            f"{path}: header keys {sorted(header)} != {sorted(_HEADER_KEYS)}"
        )
    if not isinstance(header["name"], str):
        raise TensorIntegrityError(f"{path}: name must be a string")
    if header["dtype"] != "f32":
        raise TensorIntegrityError(f"{path}: unsupported dtype {header['dtype']!r}")
    if header["order"] != "row-major":
        raise TensorIntegrityError(f"{path}: unsupported order {header['order']!r}")
    if header["endian"] != "little":
        raise TensorIntegrityError(f"{path}: unsupported endian {header['endian']!r}")
    shape = header["shape"]
    if not isinstance(shape, list) or not all(
        isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in shape
    ):
        raise TensorIntegrityError(f"{path}: shape must be a list of ints >= 0")
    count = 1
    for s in shape:
        count *= s
    payload = raw[nl + 1 :]
    if len(payload) != count * 4:
        raise TensorIntegrityError(
            f"{path}: payload is {len(payload)} bytes, expected {count * 4}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(shape)
    return header["name"], arr
