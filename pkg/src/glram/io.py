"""Matrix file formats.

CSV: one matrix row per line, '.' decimal, no header.
Binary: magic ``GLRM``, u64 rows, u64 cols, then rows*cols little-endian
float64 values in column-major order.
"""
import os
import struct
import tempfile

import numpy as np

from .matrix import as_matrix

MAGIC = b"GLRM"


def atomic_write_bytes(path, payload):
    """Write ``payload`` to ``path`` through a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def matrix_to_csv(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    # repr() of a Python float round-trips exactly
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in A)


def matrix_to_bytes(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    rows, cols = A.shape
    header = MAGIC + struct.pack("<QQ", rows, cols)
    return header + np.asarray(A, dtype="<f8").tobytes(order="F")


def matrix_from_bytes(payload):
    if payload[:4] != MAGIC:
        raise ValueError("not a GLRM binary matrix (bad magic)")
    rows, cols = struct.unpack("<QQ", payload[4:20])
    body = payload[20:]
    if len(body) != 8 * rows * cols:
        raise ValueError(f"GLRM payload has {len(body)} bytes, expected {8 * rows * cols}")
    data = np.frombuffer(body, dtype="<f8").reshape((rows, cols), order="F")
    return as_matrix(data, copy=True)


def read_matrix(path):
    """Read a CSV or GLRM binary matrix; the format is sniffed from the magic."""
    with open(path, "rb") as fh:
        payload = fh.read()
    if payload[:4] == MAGIC:
        return matrix_from_bytes(payload)
    text = payload.decode("utf-8")
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    data = [[float(tok) for tok in line.split(",")] for line in rows]
    widths = {len(r) for r in data}
    if len(widths) != 1:
        raise ValueError(f"{path}: ragged CSV rows")
    return as_matrix(data)


def write_matrix(path, A, fmt=None):
    """Write ``A`` atomically; ``fmt`` is 'csv' or 'bin' (default from extension)."""
    if fmt is None:
        fmt = "bin" if os.fspath(path).endswith((".bin", ".glrm")) else "csv"
    if fmt == "csv":
        atomic_write_text(path, matrix_to_csv(A))
    elif fmt == "bin":
        atomic_write_bytes(path, matrix_to_bytes(A))
    else:
        raise ValueError(f"unknown matrix format {fmt!r}")
