"""Signal file formats.

Two interchangeable encodings of a sampled signal:

* CSV: a first comment line ``# N=<int> axes=<1|2>``, a header ``re,im``,
  then one row per sample (row-major for 2-D).
* Raw binary: 16-byte header (magic ``HTF1``, u32 N, u32 axes, u32 pad,
  little-endian), then little-endian float64 (re, im) pairs, row-major.
"""

from __future__ import annotations

import re
import struct

import numpy as np

from .grid import GridSpec, Signal1D, Signal2D

MAGIC = b"HTF1"
_HEADER = re.compile(r"#\s*N=(\d+)\s+axes=([12])")


def _pack_signal(sig):
    n = sig.grid.size
    flat = np.ascontiguousarray(sig.samples).reshape(-1)
    return n, sig.grid.axes, flat


def _make_signal(n: int, axes: int, flat: np.ndarray):
    log_size = int(n).bit_length() - 1
    if 1 << log_size != n:
        raise ValueError(f"N={n} is not a power of two")
    grid = GridSpec(log_size, axes)
    if axes == 1:
        if flat.size != n:
            raise ValueError("sample count does not match N")
        return Signal1D(grid, flat)
    if flat.size != n * n:
        raise ValueError("sample count does not match N*N")
    return Signal2D(grid, flat.reshape(n, n))


def write_csv(path, sig):
    n, axes, flat = _pack_signal(sig)
    with open(path, "w") as fh:
        fh.write(f"# N={n} axes={axes}\n")
        fh.write("re,im\n")
        for z in flat:
            fh.write(f"{float(z.real)!r},{float(z.imag)!r}\n")


def read_csv(path):
    with open(path) as fh:
        first = fh.readline()
        m = _HEADER.match(first)
        if not m:
            raise ValueError("missing '# N=<int> axes=<1|2>' header line")
        n, axes = int(m.group(1)), int(m.group(2))
        header = fh.readline().strip()
        if header != "re,im":
            raise ValueError("expected 're,im' column header")
        rows = [line.split(",") for line in fh if line.strip()]
    flat = np.array([complex(float(a), float(b)) for a, b in rows])
    return _make_signal(n, axes, flat)


def write_binary(path, sig):
    n, axes, flat = _pack_signal(sig)
    pairs = np.empty((flat.size, 2), dtype="<f8")
    pairs[:, 0] = flat.real
    pairs[:, 1] = flat.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", n, axes, 0))
        fh.write(pairs.tobytes())


def read_binary(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError("bad magic; not an HTF1 signal file")
        n, axes, _pad = struct.unpack("<III", fh.read(12))
        body = fh.read()
    pairs = np.frombuffer(body, dtype="<f8").reshape(-1, 2)
    flat = pairs[:, 0] + 1j * pairs[:, 1]
    return _make_signal(n, axes, flat)
