import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minent.blocks import (
    distance_stream,
    load_bits,
    pack_blocks,
    save_bits,
    unpack_blocks,
)

import oracles


def test_pack_positional_encoding():
    bits = np.array([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], dtype=np.uint8)
    assert pack_blocks(bits, 6).tolist() == [0, 1]


def test_pack_all_ones_block():
    assert pack_blocks(np.ones(6, dtype=np.uint8), 6).tolist() == [63]


def test_pack_msb_first():
    assert pack_blocks([1, 0, 1, 0, 0, 0], 3).tolist() == [5, 0]


def test_pack_discards_trailing_bits():
    assert pack_blocks([1, 1, 1, 1, 0, 1, 1], 3).tolist() == [7, 5]


def test_pack_rejects_bad_input():
    with pytest.raises(ValueError):
        pack_blocks([], 3)
    with pytest.raises(ValueError):
        pack_blocks([1, 0], 0)
    with pytest.raises(ValueError):
        pack_blocks([0, 2, 1], 1)
    with pytest.raises(ValueError):
        pack_blocks([0, 1], 3)  # fewer bits than one block


@given(st.integers(1, 12), st.data())
def test_pack_unpack_roundtrip(l, data):
    blocks = data.draw(st.lists(st.integers(0, 2**l - 1), min_size=1, max_size=50))
    arr = np.array(blocks, dtype=np.int64)
    assert np.array_equal(pack_blocks(unpack_blocks(arr, l), l), arr)


def test_distance_hand_trace():
    d = distance_stream([5, 7, 5, 5], q=1, k=3)
    assert d.values.tolist() == [2, 2, 1]
    assert d.q == 1 and d.k == 3


def test_distance_constant_blocks():
    d = distance_stream(np.zeros(50, dtype=np.int64), q=1, k=49)
    assert (d.values == 1).all()


def test_distance_rejects_bad_windows():
    with pytest.raises(ValueError):
        distance_stream([1, 2, 3], q=0, k=2)
    with pytest.raises(ValueError):
        distance_stream([1, 2, 3], q=2, k=2)
    with pytest.raises(ValueError):
        distance_stream([1, 2, 3], q=1, k=0)


def test_distance_bounds_and_oracle_quick():
    rng = np.random.default_rng(42)
    for _ in range(200):
        b = int(rng.choice([4, 64]))
        q = int(rng.choice([1, 640]))
        k = int(rng.integers(1, 200))
        blocks = rng.integers(0, b, size=q + k)
        got = distance_stream(blocks, q, k).values
        n = np.arange(q + 1, q + k + 1)
        assert (got >= 1).all() and (got <= n).all()
        assert np.array_equal(got, oracles.naive_distances(blocks, q, k))


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_distance_matches_naive_scan(seed):
    rng = np.random.default_rng(seed)
    b = int(rng.choice([2, 4, 16, 64]))
    q = int(rng.integers(1, 30))
    k = int(rng.integers(1, 80))
    blocks = rng.integers(0, b, size=q + k)
    got = distance_stream(blocks, q, k).values
    assert np.array_equal(got, oracles.naive_distances(blocks, q, k))


def test_binary_file_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=8 * 125).astype(np.uint8)
    path = tmp_path / "bits.bin"
    save_bits(path, bits)
    assert np.array_equal(load_bits(path), bits)


def test_text_file_roundtrip(tmp_path):
    bits = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    path = tmp_path / "bits.txt"
    save_bits(path, bits, text=True)
    assert path.read_bytes() == b"10110"
    assert np.array_equal(load_bits(path), bits)


def test_text_detection_ignores_whitespace(tmp_path):
    path = tmp_path / "bits.txt"
    path.write_bytes(b"10 11\n0\t1\r\n")
    assert np.array_equal(load_bits(path), [1, 0, 1, 1, 0, 1])


def test_binary_detection_on_generic_bytes(tmp_path):
    path = tmp_path / "bits.bin"
    path.write_bytes(bytes([0xA5]))
    assert np.array_equal(load_bits(path), [1, 0, 1, 0, 0, 1, 0, 1])
