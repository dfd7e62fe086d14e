"""File formats: 8-bit PGM images, CFF1 float32 field files, JSON reports.

CFF1 layout, little-endian throughout:

    bytes 0..3   magic b"CFF1"
    byte  4      grid dimensionality (2 or 3)
    byte  5      channel count (1, 2, or 3)
    then         one uint32 extent per grid axis (rows, cols[, slices])
    payload      float32 values, row-major, channel-interleaved

Each failure mode raises its own exception class so callers can tell a bad
header from a truncated payload from an unsupported value range.
"""
from __future__ import annotations

import dataclasses
import json
import struct

import numpy as np

from ._validation import as_mask, as_scalar_field

MAGIC = b"CFF1"


class FileFormatError(ValueError):
    """Base class for malformed inputs to any reader in this module."""


class PgmHeaderError(FileFormatError):
    pass


class PgmMaxvalError(FileFormatError):
    pass


class PgmTruncatedError(FileFormatError):
    pass


class FieldMagicError(FileFormatError):
    pass


class FieldHeaderError(FileFormatError):
    pass


class FieldTruncatedError(FileFormatError):
    pass


# ---------------------------------------------------------------- PGM images

def _pgm_tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    i = 0
    n = len(data)
    while i < n:
        ch = data[i : i + 1]
        if ch in b" \t\r\n":
            i += 1
            continue
        if ch == b"#":
            while i < n and data[i : i + 1] not in b"\r\n":
                i += 1
            continue
        j = i
        while j < n and data[j : j + 1] not in b" \t\r\n":
            j += 1
        yield data[i:j], j
        i = j


def read_pgm(path) -> np.ndarray:
    """Read a P2 (ASCII) or P5 (binary) PGM into a float grid in [0, 255]."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks = _pgm_tokens(data)
    try:
        magic, _ = next(toks)
    except StopIteration:
        raise PgmHeaderError(f"{path}: empty file") from None
    if magic not in (b"P2", b"P5"):
        raise PgmHeaderError(f"{path}: not a PGM (magic {magic!r})")
    try:
        width_tok, _ = next(toks)
        height_tok, _ = next(toks)
        maxval_tok, end = next(toks)
        width, height, maxval = int(width_tok), int(height_tok), int(maxval_tok)
    except (StopIteration, ValueError):
        raise PgmHeaderError(f"{path}: malformed header") from None
    if width < 1 or height < 1:
        raise PgmHeaderError(f"{path}: bad dimensions {width}x{height}")
    if not (0 < maxval <= 255):
        raise PgmMaxvalError(f"{path}: maxval {maxval} unsupported (need 1..255)")
    count = width * height
    if magic == b"P5":
        payload = data[end + 1 : end + 1 + count]
        if len(payload) < count:
            raise PgmTruncatedError(
                f"{path}: expected {count} pixel bytes, found {len(payload)}"
            )
        values = np.frombuffer(payload, dtype=np.uint8, count=count)
    else:
        rest = []
        for tok, _ in toks:
            rest.append(tok)
            if len(rest) == count:
                break
        if len(rest) < count:
            raise PgmTruncatedError(
                f"{path}: expected {count} pixel values, found {len(rest)}"
            )
        try:
            values = np.array([int(t) for t in rest], dtype=np.int64)
        except ValueError:
            raise PgmTruncatedError(f"{path}: non-numeric pixel data") from None
        if values.min() < 0 or values.max() > maxval:
            raise PgmTruncatedError(f"{path}: pixel value out of range 0..{maxval}")
    return values.reshape(height, width).astype(np.float64)


def write_pgm(path, image) -> None:
    """Write a float grid in [0, 255] as binary P5, rounding to nearest int."""
    image = as_scalar_field(image, "image", ndim=2)
    if image.min() < 0.0 or image.max() > 255.0:
        raise ValueError("image values must lie in [0, 255]")
    h, w = image.shape
    payload = np.rint(image).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(payload.tobytes())


def read_mask_pgm(path) -> np.ndarray:
    """Read a PGM as a binary mask: values >= 128 map to 1."""
    return (read_pgm(path) >= 128.0).astype(np.uint8)


def write_mask_pgm(path, mask) -> None:
    """Write a binary mask as a PGM with values {0, 255}."""
    mask = as_mask(mask, "mask", ndim=2)
    write_pgm(path, mask.astype(np.float64) * 255.0)


# ------------------------------------------------------------- field files

def write_field(path, values, ndim: int | None = None) -> None:
    """Write a scalar or vector field as CFF1 (float32 payload).

    ndim is the grid dimensionality: inferred for unambiguous array ranks
    (2 -> 2D scalar, 4 -> 3D vector); a rank-3 array must say whether it is
    a 3D scalar (ndim=3) or a 2D multi-channel field (ndim=2).
    """
    arr = np.asarray(values, dtype=np.float64)
    if ndim is None:
        if arr.ndim == 2:
            ndim = 2
        elif arr.ndim == 4:
            ndim = 3
        else:
            raise ValueError(
                "rank-3 array is ambiguous; pass ndim=2 (vector image) or ndim=3 (volume)"
            )
    if ndim not in (2, 3):
        raise ValueError(f"ndim must be 2 or 3, got {ndim}")
    if arr.ndim == ndim:
        nchan = 1
    elif arr.ndim == ndim + 1:
        nchan = arr.shape[-1]
    else:
        raise ValueError(f"array rank {arr.ndim} incompatible with ndim={ndim}")
    if nchan not in (1, 2, 3):
        raise ValueError(f"channel count must be 1, 2, or 3, got {nchan}")
    dims = arr.shape[:ndim]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BB", ndim, nchan))
        fh.write(struct.pack(f"<{ndim}I", *dims))
        fh.write(arr.astype("<f4").tobytes())


def read_field_meta(path) -> tuple[int, int, tuple]:
    """Return (ndim, nchan, dims) from a CFF1 header without the payload."""
    with open(path, "rb") as fh:
        head = fh.read(6)
        if len(head) < 6 or head[:4] != MAGIC:
            raise FieldMagicError(f"{path}: bad magic {head[:4]!r}")
        ndim, nchan = head[4], head[5]
        if ndim not in (2, 3) or nchan not in (1, 2, 3):
            raise FieldHeaderError(f"{path}: bad header ndim={ndim} nchan={nchan}")
        raw = fh.read(4 * ndim)
        if len(raw) < 4 * ndim:
            raise FieldHeaderError(f"{path}: header ends before extents")
        dims = struct.unpack(f"<{ndim}I", raw)
        if any(d < 1 for d in dims):
            raise FieldHeaderError(f"{path}: zero extent in {dims}")
    return ndim, nchan, dims


def read_field(path, ndim: int | None = None, nchan: int | None = None) -> np.ndarray:
    """Read a CFF1 field as float64; channels stay on the trailing axis.

    Optional ndim / nchan assert what the caller can accept and raise
    FieldHeaderError on mismatch.
    """
    file_ndim, file_nchan, dims = read_field_meta(path)
    if ndim is not None and file_ndim != ndim:
        raise FieldHeaderError(f"{path}: expected a {ndim}D grid, file is {file_ndim}D")
    if nchan is not None and file_nchan != nchan:
        raise FieldHeaderError(
            f"{path}: expected {nchan} channel(s), file has {file_nchan}"
        )
    count = int(np.prod(dims)) * file_nchan
    offset = 6 + 4 * file_ndim
    with open(path, "rb") as fh:
        fh.seek(offset)
        payload = fh.read(4 * count)
    if len(payload) < 4 * count:
        raise FieldTruncatedError(
            f"{path}: expected {4 * count} payload bytes, found {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype="<f4", count=count).astype(np.float64)
    shape = dims if file_nchan == 1 else dims + (file_nchan,)
    return arr.reshape(shape)


# ------------------------------------------------------------------ reports

def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return _jsonable(obj.to_dict())
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def report_json(obj) -> str:
    """Serialize a report-like object (dict, dataclass, trace) to JSON text.

    Floats keep full repr precision (17 significant digits).
    """
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False)


def write_report(obj, path_or_file) -> None:
    """Write a JSON report to a path or an open text file."""
    text = report_json(obj) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="ascii") as fh:
            fh.write(text)
