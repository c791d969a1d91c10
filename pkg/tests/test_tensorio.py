import json

import numpy as np
import pytest

from slascore.errors import TensorIntegrityError
from slascore.tensorio import read_tensor, write_tensor


def test_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(123)
    for i in range(100):
        rank = int(rng.integers(0, 4))
        shape = tuple(int(rng.integers(1, 6)) for _ in range(rank))
        values = rng.normal(size=shape).astype(np.float32)
        path = tmp_path / f"t{i}.tensor"
        write_tensor(path, f"tensor-{i}", values)
        name, back = read_tensor(path)
        assert name == f"tensor-{i}"
        assert back.dtype == np.float32
        assert back.tobytes() == values.tobytes()


def test_write_is_byte_stable(tmp_path):
    values = np.arange(12, dtype=np.float32).reshape(3, 4)
    write_tensor(tmp_path / "a.tensor", "x", values)
    write_tensor(tmp_path / "b.tensor", "x", values)
    assert (tmp_path / "a.tensor").read_bytes() == (tmp_path / "b.tensor").read_bytes()


def test_header_field_order(tmp_path):
    write_tensor(tmp_path / "h.tensor", "n", np.zeros(2, dtype=np.float32))
    header_line = (tmp_path / "h.tensor").read_bytes().split(b"\n")[0].decode()
    assert header_line == '{"name":"n","dtype":"f32","shape":[2],"order":"row-major","endian":"little"}'


def test_short_payload_rejected(tmp_path):
    path = tmp_path / "short.tensor"
    write_tensor(path, "s", np.zeros(4, dtype=np.float32))
    raw = path.read_bytes()
    path.write_bytes(raw[:-4])
    with pytest.raises(TensorIntegrityError, match="payload"):
        read_tensor(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "long.tensor"
    write_tensor(path, "s", np.zeros(4, dtype=np.float32))
    path.write_bytes(path.read_bytes() + b"\x00\x00")
    with pytest.raises(TensorIntegrityError, match="payload"):
        read_tensor(path)


def test_missing_newline_rejected(tmp_path):
    path = tmp_path / "nl.tensor"
    path.write_bytes(b'{"name":"x","dtype":"f32","shape":[0],"order":"row-major","endian":"little"}')
    with pytest.raises(TensorIntegrityError, match="terminator"):
        read_tensor(path)


def test_garbage_header_rejected(tmp_path):
    path = tmp_path / "g.tensor"
    path.write_bytes(b"not json at all\n" + b"\x00" * 8)
    with pytest.raises(TensorIntegrityError, match="unparseable"):
        read_tensor(path)


@pytest.mark.parametrize(
    "mutation",
    [
        {"dtype": "f64"},
        {"order": "column-major"},
        {"endian": "big"},
        {"shape": [2, -1]},
        {"shape": "nope"},
        {"name": 7},
    ],
)
def test_bad_header_values_rejected(tmp_path, mutation):
    header = {
        "name": "x",
        "dtype": "f32",
        "shape": [2],
        "order": "row-major",
        "endian": "little",
    }
    header.update(mutation)
    path = tmp_path / "bad.tensor"
    path.write_bytes(json.dumps(header).encode() + b"\n" + b"\x00" * 8)
    with pytest.raises(TensorIntegrityError):
        read_tensor(path)


def test_extra_header_key_rejected(tmp_path):
    header = {
        "name": "x",
        "dtype": "f32",
        "shape": [1],
        "order": "row-major",
        "endian": "little",
        "extra": 1,
    }
    path = tmp_path / "extra.tensor"
    path.write_bytes(json.dumps(header).encode() + b"\n" + b"\x00" * 4)
    with pytest.raises(TensorIntegrityError, match="header keys"):
        read_tensor(path)


def test_non_finite_values_survive_format_round_trip(tmp_path):
    # The format is structural; semantic finiteness checks live in the backends.
    values = np.array([np.inf, np.nan, 1.0], dtype=np.float32)
    path = tmp_path / "nf.tensor"
    write_tensor(path, "nf", values)
    _, back = read_tensor(path)
    assert np.isinf(back[0]) and np.isnan(back[1])
