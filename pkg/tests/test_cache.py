"""Persistence of structure-constant stores: round trips and validation."""

import os

import pytest

from spflab.cache import cache_path, load_store, save_store
from spflab.schur import SchurAlgebra

STORE = {
    0: {0: {0: 1}, 3: {2: 2, 5: 1}},
    4: {1: {7: 3}},
    9: {},
}


@pytest.mark.parametrize("jsonl", [False, True])
def test_round_trip(tmp_path, jsonl):
    path = cache_path(3, 2, 2, cache_dir=tmp_path, jsonl=jsonl)
    save_store(path, 3, 2, 2, 10, STORE)
    assert load_store(path, 3, 2, 2, 10) == STORE


def test_missing_file_is_empty(tmp_path):
    path = cache_path(2, 2, 2, cache_dir=tmp_path)
    assert load_store(path, 2, 2, 2, 10) == {}


@pytest.mark.parametrize("jsonl", [False, True])
def test_header_mismatch_rejected(tmp_path, jsonl):
    path = cache_path(3, 2, 2, cache_dir=tmp_path, jsonl=jsonl)
    save_store(path, 3, 2, 2, 10, STORE)
    for bad in [(2, 2, 2, 10), (3, 3, 2, 10), (3, 2, 3, 10), (3, 2, 2, 11)]:
        with pytest.raises(ValueError):
            load_store(path, *bad)


def test_corrupt_binary_rejected(tmp_path):
    path = cache_path(2, 2, 2, cache_dir=tmp_path)
    save_store(path, 2, 2, 2, 10, STORE)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 3])  # truncate mid-record
    with pytest.raises(ValueError):
        load_store(path, 2, 2, 2, 10)
    path.write_bytes(b"garbage!" + data[8:])
    with pytest.raises(ValueError):
        load_store(path, 2, 2, 2, 10)


def test_no_temp_files_left_behind(tmp_path):
    path = cache_path(2, 2, 2, cache_dir=tmp_path)
    save_store(path, 2, 2, 2, 10, STORE)
    leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert leftovers == []


def test_cached_algebra_reproduces_products(tmp_path):
    """Rows computed fresh, persisted, reloaded: identical products."""
    fresh = SchurAlgebra(2, 2, 2)
    for left in range(fresh.dim):
        fresh.multiply_row(left)
    path = cache_path(2, 2, 2, cache_dir=tmp_path)
    save_store(path, 2, 2, 2, fresh.dim, fresh._rows)
    store = load_store(path, 2, 2, 2, fresh.dim)
    warmed = SchurAlgebra(2, 2, 2, store=store)
    for left in range(fresh.dim):
        for right in range(fresh.dim):
            assert warmed.multiply_basis(left, right) == fresh.multiply_basis(
                left, right
            )


def test_binary_and_jsonl_stores_agree(tmp_path):
    alg = SchurAlgebra(3, 2, 2)
    for left in range(alg.dim):
        alg.multiply_row(left)
    bpath = cache_path(3, 2, 2, cache_dir=tmp_path)
    jpath = cache_path(3, 2, 2, cache_dir=tmp_path, jsonl=True)
    save_store(bpath, 3, 2, 2, alg.dim, alg._rows)
    save_store(jpath, 3, 2, 2, alg.dim, alg._rows)
    assert load_store(bpath, 3, 2, 2, alg.dim) == load_store(jpath, 3, 2, 2, alg.dim)


def test_save_is_deterministic(tmp_path):
    p1 = tmp_path / "a.sc"
    p2 = tmp_path / "b.sc"
    save_store(p1, 3, 2, 2, 10, STORE)
    save_store(p2, 3, 2, 2, 10, STORE)
    assert p1.read_bytes() == p2.read_bytes()
