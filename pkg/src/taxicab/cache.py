"""On-disk count tables.

Layout: the 5-byte magic ``TXCB1``, a fixed little-endian header
(k, j_max, n_max, mode, cap, itemsize, checksum) and the row-major cells.
The checksum is a 64-bit BLAKE2b digest of the payload.
"""

from __future__ import annotations

import hashlib
import os
import struct
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import CacheError
from .partition_core import DEFAULT_MEMORY_BUDGET, CountTable, count_row

MAGIC = b"TXCB1"
HEADER = struct.Struct("<QQQBQBQ")
ENV_CACHE_DIR = "TAXICAB_CACHE_DIR"

_DTYPES = {1: np.uint8, 2: np.uint16, 4: np.uint32, 8: np.uint64}


def _checksum(payload: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def cache_store(path, table: CountTable) -> None:
    payload = np.ascontiguousarray(table.cells).astype(table.cells.dtype.newbyteorder("<"), copy=False).tobytes()
    header = HEADER.pack(
        table.k, table.j_max, table.n_max,
        0 if table.cap is None else 1, table.cap or 0,
        table.cells.dtype.itemsize, _checksum(payload),
    )
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def cache_load(path, expect_cap: Optional[int] = -1) -> CountTable:
    """Load and validate a table; ``expect_cap`` (None = exact) must match when given."""
    data = Path(path).read_bytes()
    if data[: len(MAGIC)] != MAGIC:
        raise CacheError(f"{path}: bad magic or unsupported version")
    try:
        k, j_max, n_max, mode, cap, itemsize, checksum = HEADER.unpack_from(data, len(MAGIC))
    except struct.error:
        raise CacheError(f"{path}: truncated header") from None
    if itemsize not in _DTYPES or mode not in (0, 1):
        raise CacheError(f"{path}: corrupt header")
    payload = data[len(MAGIC) + HEADER.size:]
    if len(payload) != (j_max + 1) * (n_max + 1) * itemsize:
        raise CacheError(f"{path}: payload length {len(payload)} does not match header")
    if _checksum(payload) != checksum:
        raise CacheError(f"{path}: checksum mismatch")
    table_cap = cap if mode == 1 else None
    if expect_cap != -1 and expect_cap != table_cap:
        raise CacheError(f"{path}: cached cap {table_cap} differs from requested {expect_cap}")
    cells = np.frombuffer(payload, dtype=np.dtype(_DTYPES[itemsize]).newbyteorder("<"))
    cells = cells.astype(_DTYPES[itemsize]).reshape(j_max + 1, n_max + 1)
    cells.setflags(write=False)
    return CountTable(k=k, n_max=n_max, j_max=j_max, cap=table_cap, cells=cells)


def cache_path(directory, k: int, j_max: int, n_max: int, cap: Optional[int]) -> Path:
    mode = "exact" if cap is None else f"cap{cap}"
    return Path(directory) / f"k{k}_j{j_max}_n{n_max}_{mode}.txcb"


def cached_count_row(directory, k: int, j_max: int, n_max: int, cap: Optional[int],
                     memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """count_row backed by ``directory``; a rejected cache file is rebuilt."""
    if directory is None:
        return count_row(k, j_max, n_max, cap, memory_budget)
    path = cache_path(directory, k, j_max, n_max, cap)
    if path.exists():
        try:
            return cache_load(path, cap)
        except CacheError:
            pass
    table = count_row(k, j_max, n_max, cap, memory_budget)
    Path(directory).mkdir(parents=True, exist_ok=True)
    cache_store(path, table)
    return table
