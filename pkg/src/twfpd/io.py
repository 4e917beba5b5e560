"""Signal file formats: PGM (P2/P5) for images and the TWS1 text format for n-D arrays.

TWS1 layout::

    TWS1
    <n>
    <s_1> ... <s_n>
    <values in row-major order, whitespace separated>
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

TWS_MAGIC = "TWS1"


class FormatError(ValueError):
    """Malformed signal file."""


def write_tws(path: str | Path, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=float)
    lines = [TWS_MAGIC, str(x.ndim), " ".join(str(s) for s in x.shape)]
    rows = x.reshape(-1, x.shape[-1]) if x.ndim else x.reshape(1, 1)
    lines += [" ".join(repr(float(v)) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_tws(path: str | Path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if not tokens or tokens[0] != TWS_MAGIC:
        raise FormatError(f"{path}: missing {TWS_MAGIC} header")
    try:
        n = int(tokens[1])
        shape = tuple(int(t) for t in tokens[2:2 + n])
        data = np.array([float(t) for t in tokens[2 + n:]])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"{path}: bad TWS1 header or data ({exc})") from None
    if len(shape) != n or any(s < 1 for s in shape):
        raise FormatError(f"{path}: bad shape {shape}")
    if data.size != int(np.prod(shape)):
        raise FormatError(f"{path}: expected {int(np.prod(shape))} values, found {data.size}")
    return data.reshape(shape)


def _pgm_tokens(raw: bytes, count: int) -> tuple[list[bytes], int]:
    """First ``count`` header tokens (comments skipped) and the offset after them."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(raw[start:pos])
    return tokens, pos


def read_pgm(path: str | Path) -> np.ndarray:
    """Grayscale PGM (8- or 16-bit, ASCII or binary) mapped to reals in [0, 1]."""
    raw = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(raw, 4)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: bad PGM header") from None
    if not 0 < maxval < 65536:
        raise FormatError(f"{path}: maxval {maxval} out of range")
    if magic == b"P5":
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        body = raw[pos + 1:]
        if len(body) < w * h * dtype.itemsize:
            raise FormatError(f"{path}: truncated pixel data")
        img = np.frombuffer(body, dtype=dtype, count=w * h)
    elif magic == b"P2":
        vals = raw[pos:].split()
        if len(vals) < w * h:
            raise FormatError(f"{path}: truncated pixel data")
        img = np.array([int(v) for v in vals[:w * h]])
    else:
        raise FormatError(f"{path}: not a grayscale PGM (magic {magic!r})")
    return img.reshape(h, w).astype(float) / maxval


def write_pgm(path: str | Path, x: np.ndarray, bits: int = 8) -> None:
    """Binary PGM of a 2-D array with values in [0, 1] (clipped)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise FormatError("PGM output needs a 2-D signal")
    maxval = 255 if bits == 8 else 65535
    q = np.rint(np.clip(x, 0.0, 1.0) * maxval)
    dtype = "u1" if bits == 8 else ">u2"
    header = f"P5\n{x.shape[1]} {x.shape[0]}\n{maxval}\n".encode()
    Path(path).write_bytes(header + q.astype(dtype).tobytes())


def read_signal(path: str | Path) -> np.ndarray:
    """Dispatch on the file's magic number."""
    head = Path(path).read_bytes()[:4]
    if head[:2] in (b"P2", b"P5"):
        return read_pgm(path)
    if head == TWS_MAGIC.encode():
        return read_tws(path)
    raise FormatError(f"{path}: unrecognised signal format (expected PGM or TWS1)")


def write_signal(path: str | Path, x: np.ndarray) -> None:
    if str(path).lower().endswith(".pgm"):
        write_pgm(path, x)
    else:
        write_tws(path, x)
