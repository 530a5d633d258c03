"""Acquire, clean, consolidate, and serve the tabular data everything else consumes.

All tabular files are UTF-8 CSV with a header row; dates are ISO-8601.
Region ids are 2-letter state codes or 5-digit county FIPS codes.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
import re
import shutil
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .periods import Period

_REGION_RE = re.compile(r"^([A-Z]{2}|[0-9]{5})$")

DEFAULT_KEYWORDS = ["covid", "coronavirus", "pandemic", "vaccine", "vaccination"]


class IngestionError(Exception):
    pass


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class DailyRecord:
    """One region x date x feature-value row. Missing features are None, never 0."""

    region_id: str
    date: dt.date
    features: Mapping[str, Optional[float]]

    def __post_init__(self) -> None:
        if not _REGION_RE.match(self.region_id):
            raise IngestionError(f"bad region id {self.region_id!r}")
        for name, value in self.features.items():
            if value is None:
                continue
            if not math.isfinite(value) or value < 0:
                raise IngestionError(
                    f"feature {name}={value!r} for {self.region_id}/{self.date} "
                    "must be finite and >= 0"
                )


@dataclass(frozen=True)
class CumulativeSeries:
    """Per-region cumulative counts; dates strictly increasing."""

    region_id: str
    points: tuple[tuple[dt.date, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        prev: Optional[dt.date] = None
        for day, count in self.points:
            if prev is not None and day <= prev:
                raise IngestionError(
                    f"dates not strictly increasing in {self.region_id}: "
                    f"{day} after {prev}"
                )
            prev = day
            if count < 0:
                raise IngestionError(f"negative count {count} at {day}")

    @property
    def is_monotonic(self) -> bool:
        counts = [c for _, c in self.points]
        return all(b >= a for a, b in zip(counts, counts[1:]))

    def last(self) -> tuple[dt.date, int]:
        if not self.points:
            raise IngestionError(f"empty series for {self.region_id}")
        return self.points[-1]


@dataclass(frozen=True)
class CensusRecord:
    fips: str
    county_name: str
    state: str
    lat: float
    lon: float
    population_density: float
    median_household_income: float
    pct_high_school: float

    def __post_init__(self) -> None:
        if not re.match(r"^[0-9]{5}$", self.fips):
            raise IngestionError(f"bad fips {self.fips!r}")
        if not 0 <= self.pct_high_school <= 100:
            raise IngestionError(
                f"pct_high_school {self.pct_high_school} for {self.fips} not in [0,100]"
            )
        if self.population_density <= 0:
            raise IngestionError(f"non-positive density for {self.fips}")


@dataclass(frozen=True)
class Article:
    id: str
    published: dt.datetime
    title: str
    abstract: str
    url: str


@dataclass(frozen=True)
class SourceDescriptor:
    """One external data source; http sources are re-fetched, local ones copied."""

    name: str
    kind: str  # "local_file" | "http_fetch"
    location: str
    schedule_hint: str = "daily"

    def __post_init__(self) -> None:
        if self.kind not in ("local_file", "http_fetch"):
            raise IngestionError(f"unknown source kind {self.kind!r}")
        if not self.location:
            raise IngestionError(f"source {self.name} has empty location")
        if self.kind == "http_fetch" and not self.location.startswith(("http://", "https://")):
            raise IngestionError(f"source {self.name}: {self.location!r} is not a URL")


@dataclass
class FetchResult:
    name: str
    path: Path
    stale: bool = False
    error: Optional[str] = None


# ---------------------------------------------------------------------------
# operations


def fetch_sources(
    descriptors: Sequence[SourceDescriptor], dest: Path, timeout: float = 10.0
) -> list[FetchResult]:
    """Materialize each source under dest. Per-source failures mark the entry
    stale and keep any previous file; they are never fatal."""
    dest = Path(dest)
    if not dest.is_dir():
        raise IngestionError(f"destination {dest} is not a directory")
    manifest: list[FetchResult] = []
    for desc in descriptors:
        target = dest / f"{desc.name}.csv"
        try:
            if desc.kind == "local_file":
                src = Path(desc.location)
                if not src.is_file():
                    raise IngestionError(f"local source missing: {src}")
                tmp = target.with_suffix(".tmp")
                shutil.copyfile(src, tmp)
                tmp.replace(target)
            else:
                with urllib.request.urlopen(desc.location, timeout=timeout) as resp:
                    data = resp.read()
                tmp = target.with_suffix(".tmp")
                tmp.write_bytes(data)
                tmp.replace(target)
            manifest.append(FetchResult(desc.name, target))
        except Exception as exc:  # per-source isolation
            manifest.append(FetchResult(desc.name, target, stale=True, error=str(exc)))
    return manifest


def clean_cumulative(series: CumulativeSeries) -> CumulativeSeries:
    """Repair value-constraint violations by carrying the previous count forward
    (equivalent to a running maximum)."""
    cleaned: list[tuple[dt.date, int]] = []
    prev = 0
    changed = False
    for day, count in series.points:
        if cleaned and count < prev:
            count = prev
            changed = True
        cleaned.append((day, count))
        prev = count
    if not changed:
        return series
    return CumulativeSeries(series.region_id, tuple(cleaned))


def daily_new_from_cumulative(series: CumulativeSeries) -> list[tuple[dt.date, int]]:
    """First differences; the first day's new count is the first cumulative count."""
    if not series.is_monotonic:
        raise IngestionError(
            f"series {series.region_id} is not monotonic; clean it first"
        )
    out: list[tuple[dt.date, int]] = []
    prev = 0
    for day, count in series.points:
        out.append((day, count - prev))
        prev = count
    return out


def consolidate(tables: Sequence[Sequence[DailyRecord]]) -> list[DailyRecord]:
    """Merge per-source tables into one table keyed by (region, date) with the
    union of feature columns; missing features become explicit None."""
    merged: dict[tuple[str, dt.date], dict[str, Optional[float]]] = {}
    all_features: set[str] = set()
    for table in tables:
        for rec in table:
            cell = merged.setdefault((rec.region_id, rec.date), {})
            for name, value in rec.features.items():
                all_features.add(name)
                if name in cell and cell[name] is not None and value is not None:
                    if cell[name] != value:
                        raise IngestionError(
                            f"conflicting values for ({rec.region_id}, {rec.date}, "
                            f"{name}): {cell[name]} vs {value}"
                        )
                if value is not None or name not in cell:
                    cell[name] = value
    columns = sorted(all_features)
    out = []
    for (region, day) in sorted(merged):
        cell = merged[(region, day)]
        out.append(
            DailyRecord(region, day, {c: cell.get(c) for c in columns})
        )
    return out


def filter_articles(
    articles: Sequence[Article], period: Period, keywords: Sequence[str], k: int
) -> list[Article]:
    """Keyword-matching articles within the period, newest first, at most k."""
    if k < 1:
        raise IngestionError(f"k must be >= 1, got {k}")
    if not keywords:
        raise IngestionError("empty keyword list would match nothing meaningful")
    lowered = [w.lower() for w in keywords]
    hits = [
        a
        for a in articles
        if a.published.date() in period
        and any(w in (a.title + " " + a.abstract).lower() for w in lowered)
    ]
    hits.sort(key=lambda a: (-a.published.timestamp(), a.id))
    return hits[:k]


def latest_ticker(
    regions: Sequence[str],
    cases: Mapping[str, CumulativeSeries],
    deaths: Mapping[str, CumulativeSeries],
) -> list[tuple[str, int, int, dt.date]]:
    """Latest cumulative cases/deaths per requested region, then US and WORLD.

    US is the sum over all state series at the latest date present in every
    state series (common frontier); WORLD comes from its own series.
    """
    for region in regions:
        if region in ("US", "WORLD"):
            continue
        if region not in cases or region not in deaths:
            raise IngestionError(f"unknown region {region}")

    def value_at(series: CumulativeSeries, day: dt.date) -> int:
        value = 0
        for d, c in series.points:
            if d > day:
                break
            value = c
        return value

    rows: list[tuple[str, int, int, dt.date]] = []
    for region in regions:
        if region in ("US", "WORLD"):
            continue
        cd, cc = clean_cumulative(cases[region]).last()
        _, dc = clean_cumulative(deaths[region]).last()
        rows.append((region, cc, dc, cd))

    states = sorted(r for r in cases if re.match(r"^[A-Z]{2}$", r) and r != "US")
    if states:
        frontier = min(cases[s].points[-1][0] for s in states if cases[s].points)
        us_cases = sum(value_at(clean_cumulative(cases[s]), frontier) for s in states)
        us_deaths = sum(
            value_at(clean_cumulative(deaths[s]), frontier) for s in states if s in deaths
        )
        rows.append(("US", us_cases, us_deaths, frontier))
    if "WORLD" in cases:
        wd, wc = clean_cumulative(cases["WORLD"]).last()
        _, wdc = clean_cumulative(deaths["WORLD"]).last()
        rows.append(("WORLD", wc, wdc, wd))
    return rows


# ---------------------------------------------------------------------------
# CSV schemas


def read_county_daily(path: Path) -> tuple[dict[str, CumulativeSeries], dict[str, CumulativeSeries]]:
    """County daily file `fips,date,cases,deaths` (cumulative) -> (cases, deaths)."""
    cases: dict[str, list[tuple[dt.date, int]]] = {}
    deaths: dict[str, list[tuple[dt.date, int]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            day = dt.date.fromisoformat(row["date"])
            cases.setdefault(row["fips"], []).append((day, int(row["cases"])))
            deaths.setdefault(row["fips"], []).append((day, int(row["deaths"])))
    return (
        {f: CumulativeSeries(f, tuple(sorted(p))) for f, p in cases.items()},
        {f: CumulativeSeries(f, tuple(sorted(p))) for f, p in deaths.items()},
    )


def read_state_table(path: Path) -> list[DailyRecord]:
    """State consolidated file `state,date,<sorted feature names...>`."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        features = [c for c in reader.fieldnames or [] if c not in ("state", "date")]
        for row in reader:
            out.append(
                DailyRecord(
                    row["state"],
                    dt.date.fromisoformat(row["date"]),
                    {f: (float(row[f]) if row[f] != "" else None) for f in features},
                )
            )
    return out


def write_state_table(table: Sequence[DailyRecord], path: Path) -> None:
    features = sorted({name for rec in table for name in rec.features})
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", "date"] + features)
        for rec in table:
            writer.writerow(
                [rec.region_id, rec.date.isoformat()]
                + [
                    "" if rec.features.get(f) is None else _fmt(rec.features[f])
                    for f in features
                ]
            )


def _fmt(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(value)


def read_census(path: Path) -> dict[str, CensusRecord]:
    """Census file `fips,county,state,lat,lon,population_density,median_household_income,pct_high_school`."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rec = CensusRecord(
                fips=row["fips"],
                county_name=row["county"],
                state=row["state"],
                lat=float(row["lat"]),
                lon=float(row["lon"]),
                population_density=float(row["population_density"]),
                median_household_income=float(row["median_household_income"]),
                pct_high_school=float(row["pct_high_school"]),
            )
            if rec.fips in out:
                raise IngestionError(f"duplicate census fips {rec.fips}")
            out[rec.fips] = rec
    return out


def read_articles(path: Path) -> list[Article]:
    """Articles file `id,published,title,abstract,url`."""
    out = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["id"] in seen:
                raise IngestionError(f"duplicate article id {row['id']}")
            seen.add(row["id"])
            out.append(
                Article(
                    id=row["id"],
                    published=dt.datetime.fromisoformat(row["published"]),
                    title=row["title"],
                    abstract=row["abstract"],
                    url=row["url"],
                )
            )
    return out


def read_world(path: Path) -> tuple[CumulativeSeries, CumulativeSeries]:
    """World file `date,cases,deaths` (cumulative)."""
    cases: list[tuple[dt.date, int]] = []
    deaths: list[tuple[dt.date, int]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            day = dt.date.fromisoformat(row["date"])
            cases.append((day, int(row["cases"])))
            deaths.append((day, int(row["deaths"])))
    cases.sort()
    deaths.sort()
    return CumulativeSeries("WORLD", tuple(cases)), CumulativeSeries("WORLD", tuple(deaths))


def write_county_daily(
    cases: Mapping[str, CumulativeSeries],
    deaths: Mapping[str, CumulativeSeries],
    path: Path,
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fips", "date", "cases", "deaths"])
        for fips in sorted(cases):
            dmap = dict(deaths[fips].points) if fips in deaths else {}
            for day, count in cases[fips].points:
                writer.writerow([fips, day.isoformat(), count, dmap.get(day, 0)])
