"""VECF: the bit-exact binary vector-store file format.

Layout, little-endian throughout:

    magic "VECF" (4 bytes)
    format version      u32  (= 1)
    namespace tag       u8   (0 = global, 1 = face)
    dim                 u32
    count               u64
    matrix              count * dim float32, row-major
    ids                 count * (u16 length + UTF-8 bytes)

Write-then-read round-trips bit-exactly.
"""
from __future__ import annotations

import io
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .errors import FormatError
from .model import VectorStore

MAGIC = b"VECF"
VERSION = 1
_NAMESPACE_TAGS = {"global": 0, "face": 1}
_TAG_NAMESPACES = {v: k for k, v in _NAMESPACE_TAGS.items()}


def write_vector_store(store: VectorStore, file: BinaryIO | str | Path) -> None:
    if isinstance(file, (str, Path)):
        with open(file, "wb") as fh:
            write_vector_store(store, fh)
        return
    file.write(MAGIC)
    file.write(struct.pack("<I", VERSION))
    file.write(struct.pack("<B", _NAMESPACE_TAGS[store.namespace]))
    file.write(struct.pack("<I", store.dim))
    file.write(struct.pack("<Q", store.count))
    file.write(np.ascontiguousarray(store.matrix, dtype="<f4").tobytes())
    for rid in store.row_ids:
        raw = rid.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"id too long for u16 length prefix: {rid!r}")
        file.write(struct.pack("<H", len(raw)))
        file.write(raw)


def _read_exact(fh: BinaryIO, n: int, offset: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated file while reading {what}", offset + len(data))
    return data


def read_vector_store(file: BinaryIO | str | Path) -> VectorStore:
    if isinstance(file, (str, Path)):
        with open(file, "rb") as fh:
            return read_vector_store(fh)
    fh = file
    offset = 0
    magic = _read_exact(fh, 4, offset, "magic")
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    offset += 4
    (version,) = struct.unpack("<I", _read_exact(fh, 4, offset, "version"))
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}", offset)
    offset += 4
    (tag,) = struct.unpack("<B", _read_exact(fh, 1, offset, "namespace tag"))
    if tag not in _TAG_NAMESPACES:
        raise FormatError(f"unknown namespace tag {tag}", offset)
    offset += 1
    (dim,) = struct.unpack("<I", _read_exact(fh, 4, offset, "dim"))
    if dim == 0:
        raise FormatError("dim must be positive", offset)
    offset += 4
    (count,) = struct.unpack("<Q", _read_exact(fh, 8, offset, "count"))
    offset += 8
    nbytes = count * dim * 4
    raw = _read_exact(fh, nbytes, offset, "matrix")
    matrix = np.frombuffer(raw, dtype="<f4").reshape(count, dim).copy()
    offset += nbytes
    row_ids: list[str] = []
    for i in range(count):
        (ln,) = struct.unpack("<H", _read_exact(fh, 2, offset, f"id length {i}"))
        offset += 2
        raw_id = _read_exact(fh, ln, offset, f"id {i}")
        offset += ln
        try:
            row_ids.append(raw_id.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise FormatError(f"id {i} is not valid UTF-8: {exc}", offset - ln) from exc
    try:
        return VectorStore(_TAG_NAMESPACES[tag], dim, matrix, row_ids)
    except ValueError as exc:
        raise FormatError(str(exc), offset) from exc


def store_to_bytes(store: VectorStore) -> bytes:
    buf = io.BytesIO()
    write_vector_store(store, buf)
    return buf.getvalue()


def store_from_bytes(data: bytes) -> VectorStore:
    return read_vector_store(io.BytesIO(data))
