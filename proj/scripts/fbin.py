"""Writer for the fbin matrix container used by the CLI and test suite.

Layout: magic "FMAT", u32 version=1, u64 rows, u64 cols, float64 payload,
row-major, all little-endian.
"""

import struct

import numpy as np


def write_fbin(path, matrix):
    m = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"need a non-empty 2-d matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    with open(path, "wb") as out:
        out.write(b"FMAT")
        out.write(struct.pack("<I", 1))
        out.write(struct.pack("<QQ", m.shape[0], m.shape[1]))
        out.write(m.tobytes(order="C"))


def fbin_digest(matrix):
    """FNV-1a over the fbin byte image; matches dollda::matrix_digest."""
    m = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    data = b"FMAT" + struct.pack("<QQ", m.shape[0], m.shape[1]) + m.tobytes(order="C")
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def write_labels(path, labels):
    with open(path, "w") as out:
        for label in labels:
            out.write(f"{int(label)}\n")
