import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from glram import io


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=finite))
def test_csv_and_binary_roundtrip_exact(tmp_path_factory, A):
    d = tmp_path_factory.mktemp("io")
    for name in ("m.csv", "m.bin"):
        io.write_matrix(d / name, A)
        np.testing.assert_array_equal(io.read_matrix(d / name), A)


def test_binary_layout_is_column_major():
    A = np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    payload = io.matrix_to_bytes(A)
    assert payload[:4] == b"GLRM"
    assert int.from_bytes(payload[4:12], "little") == 3
    assert int.from_bytes(payload[12:20], "little") == 2
    np.testing.assert_array_equal(np.frombuffer(payload[20:], "<f8"), [1, 3, 5, 2, 4, 6])


def test_bad_binary_rejected():
    with pytest.raises(ValueError):
        io.matrix_from_bytes(b"NOPE" + bytes(16))
    good = io.matrix_to_bytes(np.eye(2))
    with pytest.raises(ValueError):
        io.matrix_from_bytes(good[:-8])


def test_csv_format_and_ragged(tmp_path):
    p = tmp_path / "a.csv"
    io.write_matrix(p, np.array([[1.0, 0.5]]))
    assert p.read_text() == "1.0,0.5\n"
    p.write_text("1,2\n3\n")
    with pytest.raises(ValueError):
        io.read_matrix(p)


def test_atomic_write_leaves_no_temp_files(tmp_path):
    io.atomic_write_text(tmp_path / "x.txt", "hello")
    assert sorted(os.listdir(tmp_path)) == ["x.txt"]


def test_explicit_format_overrides_extension(tmp_path):
    p = tmp_path / "a.csv"
    io.write_matrix(p, np.eye(2), fmt="bin")
    assert p.read_bytes()[:4] == b"GLRM"
    np.testing.assert_array_equal(io.read_matrix(p), np.eye(2))
    with pytest.raises(ValueError):
        io.write_matrix(p, np.eye(2), fmt="xml")
