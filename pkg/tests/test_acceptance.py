"""End-to-end acceptance suite. Each test prints one PASS line on success;
a pytest failure is the FAIL line."""

import datetime as dt
import math
import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from mlndash.cache import CacheCorruptError, VizCache
from mlndash.demo_data import (
    SPRING_BREAK_PA,
    SPRING_BREAK_PB,
    VACCINATION_PA,
    VACCINATION_PB,
)
from mlndash.ingestion import CumulativeSeries, clean_cumulative
from mlndash.mln import Band, Partition, assign_band, louvain, modularity
from mlndash.service import ServiceConfig, create_app
from mlndash.viz import VizRequest

from brute_force import clique_union, layer_from_edges, max_modularity_value


def report(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


BASE = dt.date(2019, 1, 1)
DATES = [BASE + dt.timedelta(days=i) for i in range(365)]


def test_cleaning_oracle_10k_series():
    """clean_cumulative == running max on 10,000 random series; idempotent; < 5 s."""
    rng = np.random.default_rng(1234)
    start = time.perf_counter()
    for _ in range(10_000):
        length = int(rng.integers(1, 366))
        counts = rng.integers(0, 100_000, size=length)
        series = CumulativeSeries(
            "TX", tuple(zip(DATES[:length], (int(c) for c in counts)))
        )
        cleaned = clean_cumulative(series)
        got = [c for _, c in cleaned.points]
        oracle = np.maximum.accumulate(counts)
        assert got == oracle.tolist()
        again = clean_cumulative(cleaned)
        assert again.points == cleaned.points
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"cleaning sweep took {elapsed:.2f}s"
    report(f"cleaning oracle (10,000 series, {elapsed:.2f}s)")


def test_band_totality_boundary_sweep():
    """assign_band is total and matches the boundary table at every edge."""
    eps = 1e-9
    expected = {
        -100.0: Band.BIG_DIP,
        -100.0 + eps: Band.LARGE_DIP,
        -50.0 - eps: Band.LARGE_DIP,
        -50.0: Band.DIP,
        -50.0 + eps: Band.DIP,
        -eps: Band.DIP,
        0.0: Band.NO_CHANGE,
        eps: Band.RISE,
        50.0 - eps: Band.RISE,
        50.0: Band.RISE,
        50.0 + eps: Band.HIGH_RISE,
        100.0 - eps: Band.HIGH_RISE,
        100.0: Band.HIGH_RISE,
        100.0 + eps: Band.SPIKE,
        1e6: Band.SPIKE,
        math.inf: Band.SPIKE,
    }
    for p, band in expected.items():
        for _ in range(3):  # deterministic across calls
            assert assign_band(p) is band, f"assign_band({p}) != {band}"
    report(f"band totality ({len(expected)} boundary points)")


def test_louvain_vs_brute_force():
    """200 random graphs <= 9 nodes: Q >= 0.95 * exhaustive max; clique unions
    (sizes 2-5, <= 12 nodes) recovered exactly for 10 seeds; < 60 s."""
    start = time.perf_counter()
    rng = random.Random(99)
    for trial in range(200):
        n = rng.randint(4, 9)
        edges = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < rng.choice([0.3, 0.5, 0.8])
        ]
        if not edges:
            edges = [(0, 1)]
        q_best = max_modularity_value(n, edges)
        nodes = [f"n{i}" for i in range(n)]
        layer = layer_from_edges(nodes, [(nodes[u], nodes[v]) for u, v in edges])
        q_louvain = modularity(layer, louvain(layer, seed=trial))
        assert q_louvain >= 0.95 * q_best - 1e-12, (
            f"trial {trial}: louvain Q={q_louvain:.6f} < 0.95 * max Q={q_best:.6f}"
        )

    def size_multisets(total, min_part=2, max_part=5, floor=2):
        if total == 0:
            yield ()
            return
        for part in range(min(max_part, total), floor - 1, -1):
            for rest in size_multisets(total - part, min_part, part, floor):
                yield (part,) + rest

    clique_cases = 0
    for total in range(2, 13):
        for sizes in size_multisets(total):
            layer, cliques = clique_union(sizes)
            expected = {frozenset(c) for c in cliques}
            for seed in range(10):
                part = louvain(layer, seed)
                got = {frozenset(m) for m in part.members().values()}
                assert got == expected, f"cliques {sizes} seed {seed}: {got}"
            clique_cases += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"louvain sweep took {elapsed:.1f}s"
    report(
        f"louvain vs brute force (200 graphs + {clique_cases} clique unions, "
        f"{elapsed:.1f}s)"
    )


def test_modularity_spot_values():
    """Exact Q values on the single-edge and twin-triangle instances."""
    edge = layer_from_edges(["a", "b"], [("a", "b")])
    assert modularity(edge, Partition({"a": 0, "b": 0}, 1)) == 0.0
    assert modularity(edge, Partition({"a": 0, "b": 1}, 2)) == -0.5
    triangles, cliques = clique_union([3, 3])
    part = Partition({n: i for i, c in enumerate(cliques) for n in c}, 2)
    assert abs(modularity(triangles, part) - 0.5) <= 1e-12
    report("modularity spot values")


MAP_PARAMS = {
    "feature": "new_cases",
    "pa": f"{SPRING_BREAK_PA[0]}:{SPRING_BREAK_PA[1]}",
    "pb": f"{SPRING_BREAK_PB[0]}:{SPRING_BREAK_PB[1]}",
}


def test_pipeline_determinism(demo_dir, tmp_path):
    """Fixed seed + fixed fixtures -> byte-identical map JSON across 3 runs and
    across a cache-index persist/load cycle."""
    bodies = []
    for i in range(3):
        config = ServiceConfig(data_dir=demo_dir, cache_dir=tmp_path / f"run{i}")
        with TestClient(create_app(config)) as tc:
            bodies.append(tc.get("/api/v1/map", params=MAP_PARAMS).content)
    assert bodies[0] == bodies[1] == bodies[2]

    cache_dir = tmp_path / "persist"
    config = ServiceConfig(data_dir=demo_dir, cache_dir=cache_dir)
    app = create_app(config)
    with TestClient(app) as tc:
        first = tc.get("/api/v1/map", params=MAP_PARAMS)
        assert first.content == bodies[0]
        app.state.cache.persist_index("MAP")
    with TestClient(create_app(ServiceConfig(data_dir=demo_dir, cache_dir=cache_dir))) as tc:
        reloaded = tc.get("/api/v1/map", params=MAP_PARAMS)
        assert reloaded.headers["X-Cache"] == "HIT"
        assert reloaded.content == bodies[0]
    report("pipeline determinism (3 runs + index persist/load)")


def test_cache_contract(demo_dir, tmp_path):
    """Second identical request HITs with identical bytes; HIT beats a 500 ms
    generation by >= 5x; 16 concurrent misses -> exactly 1 generation."""
    config = ServiceConfig(data_dir=demo_dir, cache_dir=tmp_path / "cache")
    with TestClient(create_app(config)) as tc:
        first = tc.get("/api/v1/map", params=MAP_PARAMS)
        second = tc.get("/api/v1/map", params=MAP_PARAMS)
        assert first.headers["X-Cache"] == "MISS"
        assert second.headers["X-Cache"] == "HIT"
        assert second.content == first.content

    cache = VizCache(tmp_path / "slow")
    req = VizRequest("MAP", (("feature", "new_cases"), ("x", "slow")))
    calls = []

    def delayed() -> bytes:
        calls.append(1)
        time.sleep(0.5)
        return b"expensive payload"

    cache.get_or_generate(req, delayed)
    start = time.perf_counter()
    body, status = cache.get_or_generate(req, delayed)
    hit_latency = time.perf_counter() - start
    assert status == "HIT" and body == b"expensive payload"
    assert hit_latency <= 0.1, f"HIT took {hit_latency * 1000:.1f}ms"

    import threading

    cache2 = VizCache(tmp_path / "flight")
    results = []

    def worker():
        results.append(cache2.get_or_generate(req, delayed)[0])

    calls.clear()
    threads = [threading.Thread(target=worker) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(calls) == 1
    assert results == [b"expensive payload"] * 16
    report(f"cache contract (HIT latency {hit_latency * 1000:.1f}ms, single-flight 16->1)")


def test_scenario_directions(demo_dir, tmp_path):
    """Spring-break fixture >60% SPIKE/HIGH_RISE; vaccination fixture >60%
    DIP/LARGE_DIP/BIG_DIP."""
    config = ServiceConfig(data_dir=demo_dir, cache_dir=tmp_path / "cache")
    with TestClient(create_app(config)) as tc:
        spring = tc.get("/api/v1/map", params=MAP_PARAMS).json()["counties"]
        spike_share = sum(
            c["band"] in ("SPIKE", "HIGH_RISE") for c in spring
        ) / len(spring)
        assert spike_share > 0.6, f"spring-break spike share {spike_share:.2f}"

        vax = tc.get(
            "/api/v1/map",
            params={
                "feature": "new_cases",
                "pa": f"{VACCINATION_PA[0]}:{VACCINATION_PA[1]}",
                "pb": f"{VACCINATION_PB[0]}:{VACCINATION_PB[1]}",
            },
        ).json()["counties"]
        dip_share = sum(
            c["band"] in ("DIP", "LARGE_DIP", "BIG_DIP") for c in vax
        ) / len(vax)
        assert dip_share > 0.6, f"vaccination dip share {dip_share:.2f}"
    report(
        f"scenario directions (spike {spike_share:.0%}, dip {dip_share:.0%})"
    )


def test_index_persistence_1000_entries(tmp_path):
    """load(persist(x)) preserves 1,000 entries; truncation -> rescan recovers
    every artifact on disk."""
    cache = VizCache(tmp_path)
    for i in range(1000):
        cache.store(f"MAP|feature=new_cases&n={i}", f"payload {i}".encode())
    path = cache.persist_index("MAP")

    reloaded = VizCache(tmp_path)
    reloaded.load_index("MAP")
    original = {e.key: (e.created_at, e.bytes, e.hits) for e in cache.entries("MAP")}
    restored = {e.key: (e.created_at, e.bytes, e.hits) for e in reloaded.entries("MAP")}
    assert restored == original
    assert len(restored) == 1000

    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 3])
    corrupted = VizCache(tmp_path)
    with pytest.raises(CacheCorruptError):
        corrupted.load_index("MAP")
    corrupted.load_or_rescan("MAP")
    on_disk = {p.name for p in (tmp_path / "MAP").glob("*.json")}
    indexed = {e.artifact_path.name for e in corrupted.entries("MAP")}
    assert indexed == on_disk
    assert len(indexed) == 1000
    report("index persistence (1,000 entries + truncation rescan)")
