#!/usr/bin/env pytest
"""Unit tests for caching support."""
import gzip
import os
import shutil
import tempfile
import time

from pathlib import Path
from unittest import mock

import pytest

from witt_windows import cache


KEY = "frame-check|p=3;N=None;e=1;a=2"


@pytest.fixture
def tempdir():
    tempdir = tempfile.mkdtemp()
    yield tempdir
    if os.path.exists(tempdir):
        shutil.rmtree(tempdir)


@mock.patch("appdirs.user_cache_dir")
def test_cache_file(user_cache_dir_mock, tempdir):
    user_cache_dir_mock.return_value = tempdir
    store = cache.CacheStore(cache_period=60)
    filepath = store.cache_file(KEY)
    assert filepath.parent == Path(tempdir)
    sha = cache.CacheStore.hash_key(KEY)
    assert filepath.name == f"{sha}.gz"


@mock.patch("appdirs.user_cache_dir")
def test_clearing_cache(user_cache_dir_mock, tempdir):
    user_cache_dir_mock.return_value = tempdir
    store = cache.CacheStore(cache_period=60)
    store.write(KEY, "RESULT overall PASS\n")
    target = Path(tempdir) / f"{store.hash_key(KEY)}.gz"

    store.clear_cache()
    assert not target.exists()
    store.write(KEY, "RESULT overall PASS\n")
    assert target.exists()

    # Clear cached files older than 100 s. The file we just created is brand new so should remain.
    store.clear_cache(100)
    assert target.exists()

    # Now change the mtime of the file to be 500 s old
    now = time.time()
    os.utime(target, (now - 500, now - 500))
    store.clear_cache(100)
    assert not target.exists()


@mock.patch("appdirs.user_cache_dir")
def test_cache_no_dir(user_cache_dir_mock, tempdir):
    """Tests that the cache store will create the cache dir if it doesn't exist."""
    user_cache_dir_mock.return_value = tempdir
    tempdir = Path(tempdir)
    tempdir.rmdir()
    assert not tempdir.exists()
    cache.CacheStore(cache_period=60)
    assert tempdir.exists()


@mock.patch("appdirs.user_cache_dir")
def test_cache_fetch(user_cache_dir_mock, tempdir):
    user_cache_dir_mock.return_value = tempdir
    compute = mock.Mock(return_value=("RESULT overall PASS\n", True))
    store = cache.CacheStore(cache_period=60)
    assert store.fetch(KEY, compute) == ("RESULT overall PASS\n", True)
    assert store.fetch(KEY, compute) == ("RESULT overall PASS\n", True)
    assert compute.call_count == 1

    filepath = store.cache_file(KEY)
    with gzip.open(filepath, "wb") as f:
        f.write(b"RESULT different PASS\n")
    assert store.fetch(KEY, compute)[0] == "RESULT different PASS\n"

    # Force a cache miss
    now = time.time()
    os.utime(filepath, (now - 1000, now - 1000))
    assert store.fetch(KEY, compute)[0] == "RESULT overall PASS\n"
    assert compute.call_count == 2


@mock.patch("appdirs.user_cache_dir")
def test_failing_reports_are_not_cached(user_cache_dir_mock, tempdir):
    user_cache_dir_mock.return_value = tempdir
    compute = mock.Mock(return_value=("RESULT overall FAIL\n", False))
    store = cache.CacheStore(cache_period=60)
    assert store.fetch(KEY, compute) == ("RESULT overall FAIL\n", False)
    assert store.fetch(KEY, compute) == ("RESULT overall FAIL\n", False)
    assert compute.call_count == 2
    assert not store.cache_file(KEY).exists()


@mock.patch("appdirs.user_cache_dir")
def test_cache_disabled(user_cache_dir_mock, tempdir):
    tempdir = Path(tempdir)
    user_cache_dir_mock.return_value = tempdir
    compute = mock.Mock(return_value=("RESULT overall PASS\n", True))
    store = cache.CacheStore(cache_period=0)
    store.fetch(KEY, compute)
    store.fetch(KEY, compute)
    assert compute.call_count == 2
    cache_contents = [i for i in tempdir.iterdir()]
    assert len(cache_contents) == 0
    assert not store.cache_enabled()
    assert store.read(KEY) is None


@mock.patch("appdirs.user_cache_dir")
def test_compute_errors_propagate(user_cache_dir_mock, tempdir):
    user_cache_dir_mock.return_value = tempdir
    compute = mock.Mock(side_effect=ValueError("bad job"))
    store = cache.CacheStore(cache_period=60)
    with pytest.raises(ValueError):
        store.fetch(KEY, compute)

    # Subsequent calls compute again
    with pytest.raises(ValueError):
        store.fetch(KEY, compute)
    assert compute.call_count == 2
