"""CSV and PGM readers/writers for matrices, grid functions and images."""

from pathlib import Path

import numpy as np


def write_csv_matrix(path, X):
    np.savetxt(path, np.atleast_2d(np.asarray(X, dtype=float)), delimiter=",", fmt="%.17g")


def read_csv_matrix(path):
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float))


def write_pgm(path, image):
    """Write an 8-bit binary PGM; values are clipped to [0, 1] then scaled to 0..255."""
    img = np.clip(np.asarray(image, dtype=float), 0.0, 1.0)
    if img.ndim != 2:
        raise ValueError("PGM images must be 2-D")
    data = np.round(img * 255.0).astype(np.uint8)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def _tokens(buf, count):
    out, pos = [], 0
    while len(out) < count:
        while buf[pos:pos + 1].isspace():
            pos += 1
        if buf[pos:pos + 1] == b"#":
            pos = buf.index(b"\n", pos) + 1
            continue
        start = pos
        while not buf[pos:pos + 1].isspace():
            pos += 1
        out.append(buf[start:pos])
    return out, pos + 1


def read_pgm(path):
    """Read a binary (P5) or ASCII (P2) PGM as floats in [0, 1]."""
    buf = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _tokens(buf, 4)
    w, h, maxval = int(w), int(h), int(maxval)
    if magic == b"P5":
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        data = np.frombuffer(buf, dtype=dtype, count=w * h, offset=pos)
    elif magic == b"P2":
        data = np.array(buf[pos:].split()[: w * h], dtype=float)
    else:
        raise ValueError(f"not a PGM file: magic {magic!r}")
    return data.reshape(h, w).astype(float) / maxval
