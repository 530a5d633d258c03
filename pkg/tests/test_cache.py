import os
import threading
import time

import pytest

from mlndash.cache import CacheCorruptError, CacheError, VizCache
from mlndash.viz import VizRequest


def req(i=0):
    return VizRequest("MAP", (("feature", "new_cases"), ("n", str(i))))


def key(i=0):
    return f"MAP|feature=new_cases&n={i}"


class TestLookupStore:
    def test_store_then_lookup(self, tmp_path):
        cache = VizCache(tmp_path)
        cache.store(key(), b"payload")
        entry = cache.lookup(key())
        assert entry is not None
        assert entry.hits == 1
        assert cache.read(entry) == b"payload"

    def test_never_stored_misses(self, tmp_path):
        assert VizCache(tmp_path).lookup(key()) is None

    def test_dangling_entry_evicted(self, tmp_path):
        cache = VizCache(tmp_path)
        entry = cache.store(key(), b"payload")
        os.unlink(entry.artifact_path)
        assert cache.lookup(key()) is None
        assert cache.entries("MAP") == []

    def test_second_store_wins(self, tmp_path):
        cache = VizCache(tmp_path)
        cache.store(key(), b"one")
        cache.store(key(), b"two")
        assert cache.read(cache.lookup(key())) == b"two"

    @pytest.mark.skipif(os.geteuid() == 0, reason="root ignores directory permissions")
    def test_unwritable_dir_errors_and_still_misses(self, tmp_path):
        cache = VizCache(tmp_path)
        os.chmod(tmp_path / "MAP", 0o500)
        try:
            with pytest.raises(CacheError):
                cache.store(key(), b"payload")
            assert cache.lookup(key()) is None
        finally:
            os.chmod(tmp_path / "MAP", 0o700)


    def test_broken_dir_errors_and_still_misses(self, tmp_path):
        cache = VizCache(tmp_path)
        (tmp_path / "MAP").rmdir()
        (tmp_path / "MAP").write_text("not a directory")
        with pytest.raises(CacheError):
            cache.store(key(), b"payload")
        assert cache.lookup(key()) is None


class TestGetOrGenerate:
    def test_miss_then_hit(self, tmp_path):
        cache = VizCache(tmp_path)
        calls = []

        def gen():
            calls.append(1)
            return b"bytes"

        body1, status1 = cache.get_or_generate(req(), gen)
        body2, status2 = cache.get_or_generate(req(), gen)
        assert (status1, status2) == ("MISS", "HIT")
        assert body1 == body2 == b"bytes"
        assert len(calls) == 1

    def test_concurrent_single_flight(self, tmp_path):
        cache = VizCache(tmp_path)
        calls = []
        results = []

        def gen():
            calls.append(1)
            time.sleep(0.2)
            return b"slow bytes"

        def worker():
            results.append(cache.get_or_generate(req(), gen)[0])

        threads = [threading.Thread(target=worker) for _ in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(calls) == 1
        assert results == [b"slow bytes"] * 16

    def test_generator_failure_not_cached(self, tmp_path):
        cache = VizCache(tmp_path)

        def boom():
            raise RuntimeError("generation failed")

        with pytest.raises(RuntimeError):
            cache.get_or_generate(req(), boom)
        body, status = cache.get_or_generate(req(), lambda: b"ok")
        assert (body, status) == (b"ok", "MISS")

    def test_hit_latency_beats_generation(self, tmp_path):
        cache = VizCache(tmp_path)

        def slow():
            time.sleep(0.5)
            return b"generated"

        cache.get_or_generate(req(), slow)
        start = time.perf_counter()
        _, status = cache.get_or_generate(req(), slow)
        elapsed = time.perf_counter() - start
        assert status == "HIT"
        assert elapsed <= 0.1


class TestPersistence:
    def test_empty_round_trip(self, tmp_path):
        cache = VizCache(tmp_path)
        cache.persist_index("MAP")
        cache2 = VizCache(tmp_path)
        cache2.load_index("MAP")
        assert cache2.entries("MAP") == []

    def test_round_trip_preserves_entries(self, tmp_path):
        cache = VizCache(tmp_path)
        for i in range(50):
            cache.store(key(i), f"payload {i}".encode())
        cache.lookup(key(3))
        path = cache.persist_index("MAP")
        first = path.read_bytes()

        cache2 = VizCache(tmp_path)
        cache2.load_index("MAP")
        by_key = {e.key: e for e in cache2.entries("MAP")}
        assert set(by_key) == {key(i) for i in range(50)}
        assert by_key[key(3)].hits == 1
        # re-serialization is byte-for-byte identical
        assert cache2.persist_index("MAP").read_bytes() == first

    def test_truncated_snapshot_raises(self, tmp_path):
        cache = VizCache(tmp_path)
        for i in range(5):
            cache.store(key(i), b"x")
        path = cache.persist_index("MAP")
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 7])
        cache2 = VizCache(tmp_path)
        with pytest.raises(CacheCorruptError):
            cache2.load_index("MAP")

    def test_rescan_recovers_artifacts(self, tmp_path):
        cache = VizCache(tmp_path)
        for i in range(5):
            cache.store(key(i), f"p{i}".encode())
        path = cache.persist_index("MAP")
        path.write_bytes(path.read_bytes()[:10])

        cache2 = VizCache(tmp_path)
        cache2.load_or_rescan("MAP")
        recovered = {e.key for e in cache2.entries("MAP")}
        assert recovered == {key(i) for i in range(5)}
        entry = cache2.lookup(key(2))
        assert cache2.read(entry) == b"p2"

    def test_missing_snapshot_rescans(self, tmp_path):
        cache = VizCache(tmp_path)
        cache.store(key(), b"x")
        cache2 = VizCache(tmp_path)
        cache2.load_or_rescan("MAP")
        assert [e.key for e in cache2.entries("MAP")] == [key()]


class TestInvalidate:
    def test_invalidate_clears_kind(self, tmp_path):
        cache = VizCache(tmp_path)
        cache.store(key(), b"x")
        tl_key = "TIMELINE|left=trips"
        cache.store(tl_key, b"y")
        assert cache.invalidate("MAP") == 1
        assert cache.lookup(key()) is None
        assert cache.lookup(tl_key) is not None

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(CacheError, match="unknown kind"):
            VizCache(tmp_path).invalidate("PIE")


class TestMaxEntries:
    def test_oldest_evicted(self, tmp_path):
        cache = VizCache(tmp_path, max_entries=2)
        for i in range(3):
            cache.store(key(i), b"x")
            time.sleep(0.01)
        live = {e.key for e in cache.entries("MAP")}
        assert live == {key(1), key(2)}
