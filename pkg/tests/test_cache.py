import pytest

from taxicab.cache import cache_load, cache_path, cache_store, cached_count_row
from taxicab.errors import CacheError
from taxicab.partition_core import count_row


@pytest.mark.parametrize("cap", [None, 3, 300, 70000])
def test_round_trip(tmp_path, cap):
    table = count_row(2, 6, 1000, cap)
    path = tmp_path / "t.txcb"
    cache_store(path, table)
    assert cache_load(path) == table
    assert cache_load(path, cap) == table


def test_truncated_file_rejected(tmp_path):
    path = tmp_path / "t.txcb"
    cache_store(path, count_row(2, 6, 1000, 5))
    data = path.read_bytes()
    path.write_bytes(data[:-10])
    with pytest.raises(CacheError, match="payload length"):
        cache_load(path)
    path.write_bytes(data[:12])
    with pytest.raises(CacheError, match="truncated"):
        cache_load(path)


def test_bad_magic_and_checksum(tmp_path):
    path = tmp_path / "t.txcb"
    cache_store(path, count_row(2, 6, 1000, 5))
    data = bytearray(path.read_bytes())
    path.write_bytes(b"TXCB0" + bytes(data[5:]))
    with pytest.raises(CacheError, match="magic"):
        cache_load(path)
    data[-1] ^= 1
    path.write_bytes(bytes(data))
    with pytest.raises(CacheError, match="checksum"):
        cache_load(path)


def test_cap_is_part_of_identity(tmp_path):
    path = tmp_path / "t.txcb"
    cache_store(path, count_row(2, 6, 1000, 5))
    with pytest.raises(CacheError, match="cap"):
        cache_load(path, 6)
    with pytest.raises(CacheError, match="cap"):
        cache_load(path, None)


def test_cached_builder_rebuilds_corrupt_file(tmp_path):
    first = cached_count_row(tmp_path, 2, 5, 500, 4)
    path = cache_path(tmp_path, 2, 5, 500, 4)
    assert path.exists()
    path.write_bytes(path.read_bytes()[:-3])
    again = cached_count_row(tmp_path, 2, 5, 500, 4)
    assert again == first == count_row(2, 5, 500, 4)
    assert cache_load(path, 4) == first
