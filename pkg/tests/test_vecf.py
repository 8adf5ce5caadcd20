import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from statuary import FormatError, VectorStore
from statuary.vecf import (
    read_vector_store,
    store_from_bytes,
    store_to_bytes,
    write_vector_store,
)


def make_store(namespace, rows, ids):
    m = np.array(rows, dtype=np.float32).reshape(len(ids), -1)
    return VectorStore(namespace, m.shape[1] if m.size else 1, m, ids)


def test_round_trip_simple(tmp_path):
    store = make_store("global", [[1, 0]], ["img1"])
    path = tmp_path / "s.vecf"
    write_vector_store(store, path)
    assert read_vector_store(path) == store


def test_round_trip_empty():
    store = VectorStore("face", 3, np.zeros((0, 3), dtype=np.float32), [])
    assert store_from_bytes(store_to_bytes(store)) == store


def test_bad_magic():
    data = b"XXXX" + store_to_bytes(make_store("global", [[1, 0]], ["a"]))[4:]
    with pytest.raises(FormatError) as exc:
        store_from_bytes(data)
    assert exc.value.offset == 0


def test_bad_version():
    data = bytearray(store_to_bytes(make_store("global", [[1, 0]], ["a"])))
    data[4] = 99
    with pytest.raises(FormatError) as exc:
        store_from_bytes(bytes(data))
    assert exc.value.offset == 4


def test_truncation_reports_offset():
    data = store_to_bytes(make_store("global", [[1, 0], [0, 1]], ["a", "b"]))
    with pytest.raises(FormatError) as exc:
        store_from_bytes(data[:-3])
    assert 0 < exc.value.offset <= len(data)


def test_non_seekable_stream():
    store = make_store("face", [[0, 1, 0]], ["f1"])
    buf = io.BytesIO()
    write_vector_store(store, buf)
    buf.seek(0)
    assert read_vector_store(buf) == store


@settings(max_examples=60, deadline=None)
@given(
    namespace=st.sampled_from(["global", "face"]),
    dim=st.integers(1, 9),
    count=st.integers(0, 12),
    seed=st.integers(0, 2**31),
)
def test_round_trip_fuzz_bit_exact(namespace, dim, count, seed):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(count, dim)).astype(np.float32)
    ids = [f"id-{seed}-{i}-仏" for i in range(count)]
    store = VectorStore(namespace, dim, matrix, ids)
    back = store_from_bytes(store_to_bytes(store))
    assert back.namespace == store.namespace
    assert back.row_ids == store.row_ids
    assert back.matrix.tobytes() == store.matrix.tobytes()
    # serialization itself is deterministic
    assert store_to_bytes(back) == store_to_bytes(store)
