"""Multilayer-network analysis: band-based clique layers over counties,
Louvain community detection, severity categorization, and enriched
community allocation output."""

from __future__ import annotations

import csv
import datetime as dt
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Callable, Mapping, Optional, Sequence

from .ingestion import CensusRecord
from .periods import Period

GAIN_EPSILON = 1e-7


class MlnError(Exception):
    pass


class Band(Enum):
    """Percentage-change severity bands, most severe first."""

    SPIKE = "SPIKE"  # p > 100
    HIGH_RISE = "HIGH_RISE"  # 50 < p <= 100
    RISE = "RISE"  # 0 < p <= 50
    NO_CHANGE = "NO_CHANGE"  # p == 0
    DIP = "DIP"  # -50 <= p < 0
    LARGE_DIP = "LARGE_DIP"  # -100 < p < -50
    BIG_DIP = "BIG_DIP"  # p == -100


SEVERITY_ORDER = list(Band)  # SPIKE first; lower index = more severe


@dataclass(frozen=True)
class MlnLayer:
    """One simple undirected graph layer; edges connect counties in the same band."""

    name: str
    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]  # (u, v) with u < v
    band_of: Mapping[str, Band]

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class Mln:
    """A set of layers plus (unused by analysis) inter-layer link sets."""

    layers: tuple[MlnLayer, ...]
    interlayer_links: tuple[frozenset[tuple[str, str]], ...] = ()


@dataclass(frozen=True)
class Partition:
    community_of: Mapping[str, int]
    num_communities: int

    def __post_init__(self) -> None:
        ids = set(self.community_of.values())
        if ids != set(range(self.num_communities)):
            raise MlnError("community ids must be contiguous from 0")

    def members(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {c: [] for c in range(self.num_communities)}
        for node, c in self.community_of.items():
            out[c].append(node)
        return out


@dataclass(frozen=True)
class AllocationRow:
    fips: str
    community_id: int
    band: Band
    percent_change: float
    census: CensusRecord


@dataclass(frozen=True)
class CommunityAllocation:
    rows: tuple[AllocationRow, ...]


# ---------------------------------------------------------------------------
# operations


def percent_change(
    county_series: Sequence[tuple[dt.date, int]], a: Period, b: Period
) -> float:
    """100 * (S_b - S_a) / S_a over period sums of daily new counts.

    S_a = 0 maps to +inf when S_b > 0 and to 0 when both sums are zero.
    """
    if a.overlaps(b):
        raise MlnError(f"periods overlap: {a.canonical()} vs {b.canonical()}")
    if b.end < a.start:
        raise MlnError(f"period b {b.canonical()} precedes a {a.canonical()}")
    s_a = sum(count for day, count in county_series if day in a)
    s_b = sum(count for day, count in county_series if day in b)
    if s_a == 0:
        return math.inf if s_b > 0 else 0.0
    return 100.0 * (s_b - s_a) / s_a


def assign_band(p: float) -> Band:
    """Total over [-100, +inf]; boundaries at -100, -50, 0, +50, +100."""
    if p < -100:
        raise MlnError(f"percent change {p} below -100 is impossible")
    if p > 100:
        return Band.SPIKE
    if p > 50:
        return Band.HIGH_RISE
    if p > 0:
        return Band.RISE
    if p == 0:
        return Band.NO_CHANGE
    if p >= -50:
        return Band.DIP
    if p > -100:
        return Band.LARGE_DIP
    return Band.BIG_DIP


def build_layer(changes: Mapping[str, float], name: str) -> MlnLayer:
    """Counties as nodes; a clique per band (edge iff same band)."""
    if not changes:
        raise MlnError("no counties to build a layer from")
    band_of = {fips: assign_band(p) for fips, p in changes.items()}
    by_band: dict[Band, list[str]] = {}
    for fips in sorted(changes):
        by_band.setdefault(band_of[fips], []).append(fips)
    edges = frozenset(
        pair for members in by_band.values() for pair in combinations(members, 2)
    )
    return MlnLayer(name, tuple(sorted(changes)), edges, band_of)


def modularity(layer: MlnLayer, part: Partition) -> float:
    """Q = sum_c [ in_c/(2m) - (tot_c/(2m))^2 ], unweighted edges."""
    missing = set(layer.nodes) - set(part.community_of)
    if missing:
        raise MlnError(f"partition misses nodes: {sorted(missing)[:5]}")
    m = len(layer.edges)
    if m == 0:
        raise MlnError("modularity undefined for edgeless graph")
    degree: dict[str, int] = {n: 0 for n in layer.nodes}
    internal: dict[int, int] = {}
    for u, v in layer.edges:
        degree[u] += 1
        degree[v] += 1
        if part.community_of[u] == part.community_of[v]:
            internal[part.community_of[u]] = internal.get(part.community_of[u], 0) + 1
    tot: dict[int, int] = {}
    for node, c in part.community_of.items():
        tot[c] = tot.get(c, 0) + degree[node]
    two_m = 2.0 * m
    return sum(
        2.0 * internal.get(c, 0) / two_m - (tot[c] / two_m) ** 2 for c in tot
    )


def louvain(
    layer: MlnLayer,
    seed: int,
    on_level: Optional[Callable[[float], None]] = None,
    restarts: int = 16,
) -> Partition:
    """Two-phase Louvain: seeded-shuffle local moves maximizing modularity gain,
    then aggregation, until no move gains more than GAIN_EPSILON, followed by a
    node-level refinement sweep on the original graph. The best of ``restarts``
    seeded runs wins (greedy local moves alone can stall well short of the
    optimum on small dense graphs).

    Deterministic given the seed; ties between equal-gain moves go to the
    lowest target community id. ``on_level`` receives the modularity of the
    flattened partition after each level of the winning run.
    """
    if not layer.nodes:
        raise MlnError("empty graph")
    index = {n: i for i, n in enumerate(layer.nodes)}

    # edgeless graphs: modularity is undefined, every node is its own community
    if not layer.edges:
        return Partition({n: index[n] for n in layer.nodes}, len(layer.nodes))

    rng = random.Random(seed)
    best: Optional[tuple[float, Partition, list[float]]] = None
    for _ in range(max(1, restarts)):
        run_rng = random.Random(rng.randrange(2**31))
        part, history = _louvain_run(layer, index, run_rng)
        q = history[-1]
        if best is None or q > best[0] + GAIN_EPSILON:
            best = (q, part, history)
    assert best is not None
    if on_level is not None:
        for q in best[2]:
            on_level(q)
    return best[1]


def _louvain_run(
    layer: MlnLayer, index: Mapping[str, int], rng: random.Random
) -> tuple[Partition, list[float]]:
    n = len(layer.nodes)
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for u, v in layer.edges:
        iu, iv = index[u], index[v]
        adj[iu][iv] = adj[iu].get(iv, 0.0) + 1.0
        adj[iv][iu] = adj[iv].get(iu, 0.0) + 1.0
    orig_adj = adj
    self_loops = [0.0] * n  # aggregated intra-community weight, counted twice
    membership = list(range(n))  # original node -> current-level supernode
    history: list[float] = []

    def flat(memb: list[int]) -> Partition:
        final = _renumber(memb)
        return Partition(
            {node: final[index[node]] for node in layer.nodes}, max(final) + 1
        )

    while True:
        comm = _renumber(_local_moves(adj, self_loops, rng))
        num = max(comm) + 1
        membership = [comm[membership[i]] for i in range(n)]
        history.append(modularity(layer, flat(membership)))
        if num == len(adj):
            break
        adj, self_loops = _aggregate(adj, self_loops, comm, num)

    # refinement: node-level moves on the original graph starting from the
    # flattened partition (aggregation can lock nodes into block boundaries)
    membership = _refine(orig_adj, _renumber(membership), rng)
    part = flat(membership)
    history.append(modularity(layer, part))
    return part, history


def _local_moves(
    adj: list[dict[int, float]], self_loops: list[float], rng: random.Random
) -> list[int]:
    n = len(adj)
    community = list(range(n))
    k = [sum(adj[i].values()) + self_loops[i] for i in range(n)]
    tot = k[:]
    two_m = sum(k)
    order = list(range(n))
    rng.shuffle(order)
    moved = True
    while moved:
        moved = False
        for node in order:
            old = community[node]
            # weights from node to each neighboring community
            links: dict[int, float] = {}
            for nbr, w in adj[node].items():
                links[community[nbr]] = links.get(community[nbr], 0.0) + w
            tot[old] -= k[node]
            best_c, best_gain = old, links.get(old, 0.0) - tot[old] * k[node] / two_m
            # ascending scan + strict improvement: equal-gain moves resolve to
            # the lowest community id, and staying beats a zero-gain move
            for c in sorted(links):
                if c == old:
                    continue
                gain = links[c] - tot[c] * k[node] / two_m
                if gain > best_gain + GAIN_EPSILON:
                    best_c, best_gain = c, gain
            tot[best_c] += k[node]
            if best_c != old:
                community[node] = best_c
                moved = True
    return community


def _refine(
    adj: list[dict[int, float]], community: list[int], rng: random.Random
) -> list[int]:
    """One more local-move phase over single nodes, allowed to split a node off
    into a fresh community."""
    n = len(adj)
    community = community[:]
    k = [sum(neighbors.values()) for neighbors in adj]
    two_m = sum(k)
    free = max(community) + 1
    tot: dict[int, float] = {}
    for i in range(n):
        tot[community[i]] = tot.get(community[i], 0.0) + k[i]
    order = list(range(n))
    rng.shuffle(order)
    moved = True
    while moved:
        moved = False
        for node in order:
            old = community[node]
            links: dict[int, float] = {}
            for nbr, w in adj[node].items():
                links[community[nbr]] = links.get(community[nbr], 0.0) + w
            tot[old] -= k[node]
            best_c = old
            best_gain = links.get(old, 0.0) - tot[old] * k[node] / two_m
            for c in sorted(links) + [free]:
                if c == old:
                    continue
                gain = links.get(c, 0.0) - tot.get(c, 0.0) * k[node] / two_m
                if gain > best_gain + GAIN_EPSILON:
                    best_c, best_gain = c, gain
            tot[best_c] = tot.get(best_c, 0.0) + k[node]
            if best_c != old:
                community[node] = best_c
                moved = True
                if best_c == free:
                    free += 1
    return community


def _renumber(community: list[int]) -> list[int]:
    mapping: dict[int, int] = {}
    out = []
    for c in community:
        if c not in mapping:
            mapping[c] = len(mapping)
        out.append(mapping[c])
    return out


def _aggregate(
    adj: list[dict[int, float]],
    self_loops: list[float],
    comm: list[int],
    num: int,
) -> tuple[list[dict[int, float]], list[float]]:
    new_adj: list[dict[int, float]] = [dict() for _ in range(num)]
    new_loops = [0.0] * num
    for i, neighbors in enumerate(adj):
        ci = comm[i]
        new_loops[ci] += self_loops[i]
        for j, w in neighbors.items():
            cj = comm[j]
            if ci == cj:
                new_loops[ci] += w  # each intra edge visited from both ends
            else:
                new_adj[ci][cj] = new_adj[ci].get(cj, 0.0) + w
    return new_adj, new_loops


def categorize(layer: MlnLayer, part: Partition) -> dict[int, Band]:
    """Label each community with its members' band; mixed communities take the
    majority band, ties going to the more severe one."""
    out: dict[int, Band] = {}
    for cid, members in part.members().items():
        counts: dict[Band, int] = {}
        for node in members:
            band = layer.band_of[node]
            counts[band] = counts.get(band, 0) + 1
        best = max(counts.items(), key=lambda kv: (kv[1], -SEVERITY_ORDER.index(kv[0])))
        out[cid] = best[0]
    return out


def make_allocation(
    layer: MlnLayer,
    part: Partition,
    changes: Mapping[str, float],
    census: Mapping[str, CensusRecord],
) -> CommunityAllocation:
    missing = [fips for fips in layer.nodes if fips not in census]
    if missing:
        raise MlnError(f"missing census records for: {', '.join(sorted(missing))}")
    rows = tuple(
        AllocationRow(
            fips=fips,
            community_id=part.community_of[fips],
            band=layer.band_of[fips],
            percent_change=changes[fips],
            census=census[fips],
        )
        for fips in sorted(layer.nodes)
    )
    return CommunityAllocation(rows)


# ---------------------------------------------------------------------------
# allocation CSV + full pipeline

ALLOCATION_COLUMNS = [
    "fips",
    "community_id",
    "band",
    "percent_change",
    "county",
    "state",
    "lat",
    "lon",
    "population_density",
    "median_household_income",
    "pct_high_school",
]


def write_allocation(alloc: CommunityAllocation, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALLOCATION_COLUMNS)
        for row in alloc.rows:
            c = row.census
            writer.writerow(
                [
                    row.fips,
                    row.community_id,
                    row.band.value,
                    "inf" if math.isinf(row.percent_change) else f"{row.percent_change:.6g}",
                    c.county_name,
                    c.state,
                    c.lat,
                    c.lon,
                    c.population_density,
                    c.median_household_income,
                    c.pct_high_school,
                ]
            )


def analyze(
    county_new: Mapping[str, Sequence[tuple[dt.date, int]]],
    census: Mapping[str, CensusRecord],
    feature: str,
    period_a: Period,
    period_b: Period,
    seed: int,
) -> tuple[MlnLayer, Partition, dict[int, Band], CommunityAllocation]:
    """Full category-II pipeline over per-county daily-new series."""
    changes = {
        fips: percent_change(series, period_a, period_b)
        for fips, series in county_new.items()
    }
    layer = build_layer(changes, f"{feature}:{period_a.canonical()}vs{period_b.canonical()}")
    part = louvain(layer, seed)
    bands = categorize(layer, part)
    alloc = make_allocation(layer, part, changes, census)
    return layer, part, bands, alloc
