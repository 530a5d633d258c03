"""HTTP integration layer: map/timeline/ticker/articles endpoints orchestrating
ingestion, MLN analysis, and the visualization cache."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import ingestion, mln, viz
from .cache import VizCache
from .ingestion import CumulativeSeries, DailyRecord, IngestionError
from .periods import Period

log = logging.getLogger("mlndash")

MAP_FEATURES = ("new_cases", "new_deaths")

MIN_REFRESH_INTERVAL_S = 60


class BadRequest(Exception):
    def __init__(self, code: str, detail: str) -> None:
        super().__init__(detail)
        self.code = code
        self.detail = detail


@dataclass
class ServiceConfig:
    data_dir: Path
    cache_dir: Path
    host: str = "127.0.0.1"
    port: int = 8040
    default_seed: int = 42
    keyword_list: list[str] = field(default_factory=lambda: list(ingestion.DEFAULT_KEYWORDS))
    refresh_interval_s: int = 3600
    static_dir: Optional[Path] = None

    def __post_init__(self) -> None:
        self.data_dir = Path(self.data_dir)
        self.cache_dir = Path(self.cache_dir)
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)
        if not self.data_dir.is_dir():
            raise ValueError(f"data_dir {self.data_dir} is not a directory")
        if self.refresh_interval_s < MIN_REFRESH_INTERVAL_S:
            raise ValueError("refresh_interval must be at least 1 minute")

    @classmethod
    def load(cls, path: Path) -> "ServiceConfig":
        path = Path(path)
        if path.suffix == ".toml":
            import tomllib

            raw = tomllib.loads(path.read_text(encoding="utf-8"))
        else:
            raw = json.loads(path.read_text(encoding="utf-8"))
        return cls(**raw)


@dataclass(frozen=True)
class DataSnapshot:
    """Immutable view of all loaded data; refresh swaps the whole snapshot."""

    county_new: dict[str, list[tuple[dt.date, int]]]  # feature -> handled upstream
    county_new_deaths: dict[str, list[tuple[dt.date, int]]]
    census: dict[str, ingestion.CensusRecord]
    state_table: list[DailyRecord]
    state_features: frozenset[str]
    known_states: frozenset[str]
    ticker_cases: dict[str, CumulativeSeries]
    ticker_deaths: dict[str, CumulativeSeries]
    articles: list[ingestion.Article]
    digest: str

    def county_series(self, feature: str) -> dict[str, list[tuple[dt.date, int]]]:
        if feature == "new_cases":
            return self.county_new
        if feature == "new_deaths":
            return self.county_new_deaths
        raise BadRequest("unknown_feature", f"unknown feature {feature!r}")


def load_snapshot(data_dir: Path) -> DataSnapshot:
    data_dir = Path(data_dir)
    county_cases, county_deaths = ingestion.read_county_daily(data_dir / "counties.csv")
    census = ingestion.read_census(data_dir / "census.csv")
    state_table = ingestion.read_state_table(data_dir / "states.csv")
    articles = ingestion.read_articles(data_dir / "articles.csv")
    world_cases, world_deaths = ingestion.read_world(data_dir / "world.csv")

    county_new = {
        fips: ingestion.daily_new_from_cumulative(ingestion.clean_cumulative(s))
        for fips, s in county_cases.items()
    }
    county_new_deaths = {
        fips: ingestion.daily_new_from_cumulative(ingestion.clean_cumulative(s))
        for fips, s in county_deaths.items()
    }

    state_cases: dict[str, list[tuple[dt.date, int]]] = {}
    state_deaths: dict[str, list[tuple[dt.date, int]]] = {}
    for rec in state_table:
        if rec.features.get("cases") is not None:
            state_cases.setdefault(rec.region_id, []).append(
                (rec.date, int(rec.features["cases"]))
            )
        if rec.features.get("deaths") is not None:
            state_deaths.setdefault(rec.region_id, []).append(
                (rec.date, int(rec.features["deaths"]))
            )
    ticker_cases = {
        s: CumulativeSeries(s, tuple(sorted(pts))) for s, pts in state_cases.items()
    }
    ticker_deaths = {
        s: CumulativeSeries(s, tuple(sorted(pts))) for s, pts in state_deaths.items()
    }
    ticker_cases["WORLD"] = world_cases
    ticker_deaths["WORLD"] = world_deaths

    digest = hashlib.sha256()
    for name in sorted(p.name for p in data_dir.glob("*.csv")):
        digest.update((data_dir / name).read_bytes())

    return DataSnapshot(
        county_new=county_new,
        county_new_deaths=county_new_deaths,
        census=census,
        state_table=state_table,
        state_features=frozenset(
            name for rec in state_table for name in rec.features
        ),
        known_states=frozenset(rec.region_id for rec in state_table),
        ticker_cases=ticker_cases,
        ticker_deaths=ticker_deaths,
        articles=articles,
        digest=digest.hexdigest(),
    )


# ---------------------------------------------------------------------------
# request parsing helpers


def _parse_period(raw: Optional[str], name: str) -> Period:
    if not raw:
        raise BadRequest("missing_param", f"missing required parameter {name}")
    try:
        return Period.parse(raw)
    except ValueError as exc:
        raise BadRequest("bad_period", str(exc)) from None


def _parse_states(raw: Optional[str]) -> list[str]:
    if not raw:
        return []
    return [s.strip().upper() for s in raw.split(",") if s.strip()]


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="mlndash", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.snapshot = load_snapshot(config.data_dir)
    app.state.cache = VizCache(config.cache_dir)
    for kind in ("MAP", "TIMELINE"):
        app.state.cache.load_or_rescan(kind)
    app.state.refresh_lock = threading.Lock()
    (config.cache_dir / "configs").mkdir(parents=True, exist_ok=True)

    @app.exception_handler(BadRequest)
    async def _bad_request(request: Request, exc: BadRequest) -> JSONResponse:
        return JSONResponse({"error": exc.code, "detail": exc.detail}, status_code=400)

    @app.exception_handler(Exception)
    async def _internal(request: Request, exc: Exception) -> JSONResponse:
        incident = uuid.uuid4().hex[:12]
        log.exception("internal error %s on %s", incident, request.url.path)
        return JSONResponse(
            {"error": "internal", "detail": f"incident {incident}"}, status_code=500
        )

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "data_digest": app.state.snapshot.digest}

    @app.get("/api/v1/map")
    async def map_endpoint(request: Request) -> Response:
        q = request.query_params
        feature = (q.get("feature") or "").lower()
        if feature not in MAP_FEATURES:
            raise BadRequest(
                "unknown_feature",
                f"unknown feature {feature!r}; supported: {', '.join(MAP_FEATURES)}",
            )
        pa = _parse_period(q.get("pa"), "pa")
        pb = _parse_period(q.get("pb"), "pb")
        if pa.overlaps(pb):
            raise BadRequest("periods_overlap", "periods overlap")
        if pb.end < pa.start:
            raise BadRequest("periods_out_of_order", "period b precedes period a")
        seed = int(q.get("seed") or config.default_seed)
        snapshot: DataSnapshot = app.state.snapshot

        req = viz.VizRequest(
            "MAP",
            (
                ("feature", feature),
                ("pa", pa.canonical()),
                ("pb", pb.canonical()),
                ("seed", str(seed)),
            ),
        )

        def generate() -> bytes:
            analysis_config = {
                "expression": "communities(layer(feature, pa, pb))",
                "feature": feature,
                "period_a": {"start": pa.start.isoformat(), "end": pa.end.isoformat()},
                "period_b": {"start": pb.start.isoformat(), "end": pb.end.isoformat()},
                "inputs": {
                    "counties": str(config.data_dir / "counties.csv"),
                    "census": str(config.data_dir / "census.csv"),
                },
                "seed": seed,
            }
            digest = hashlib.sha256(viz.canonical_key(req).encode()).hexdigest()[:16]
            cfg_path = config.cache_dir / "configs" / f"{digest}.json"
            cfg_path.write_text(json.dumps(analysis_config, indent=2), encoding="utf-8")

            _, _, _, alloc = mln.analyze(
                snapshot.county_series(feature),
                snapshot.census,
                feature,
                pa,
                pb,
                seed,
            )
            title = (
                f"Communities by {feature} change, "
                f"{pa.canonical()} vs {pb.canonical()}"
            )
            return viz.to_canonical_bytes(viz.generate_map_payload(alloc, title))

        payload, status = app.state.cache.get_or_generate(req, generate)
        return Response(
            payload, media_type="application/json", headers={"X-Cache": status}
        )

    @app.get("/api/v1/timeline")
    async def timeline_endpoint(request: Request) -> Response:
        q = request.query_params
        snapshot: DataSnapshot = app.state.snapshot
        states = _parse_states(q.get("states"))
        if not 1 <= len(states) <= viz.MAX_TIMELINE_STATES:
            raise BadRequest(
                "bad_states", f"need 1..{viz.MAX_TIMELINE_STATES} states, got {len(states)}"
            )
        unknown = [s for s in states if s not in snapshot.known_states]
        if unknown:
            raise BadRequest("unknown_state", f"unknown state(s): {', '.join(unknown)}")
        left = (q.get("left") or "").lower()
        right = (q.get("right") or "").lower()
        for feat in (left, right):
            if feat not in snapshot.state_features:
                raise BadRequest("unknown_feature", f"unknown feature {feat!r}")
        raw_range = q.get("range")
        if not raw_range or ":" not in raw_range:
            raise BadRequest("bad_range", f"bad date range {raw_range!r}")
        try:
            start_s, end_s = raw_range.split(":")
            start, end = dt.date.fromisoformat(start_s), dt.date.fromisoformat(end_s)
        except ValueError as exc:
            raise BadRequest("bad_range", str(exc)) from None
        if start > end:
            raise BadRequest("bad_range", "range start after end")

        req = viz.VizRequest(
            "TIMELINE",
            (
                ("left", left),
                ("range", f"{start.isoformat()}:{end.isoformat()}"),
                ("right", right),
                ("states", ",".join(sorted(states))),
            ),
        )

        def generate() -> bytes:
            payload = viz.generate_timeline_payload(
                snapshot.state_table, sorted(states), left, right, (start, end)
            )
            return viz.to_canonical_bytes(payload)

        payload, status = app.state.cache.get_or_generate(req, generate)
        return Response(
            payload, media_type="application/json", headers={"X-Cache": status}
        )

    @app.get("/api/v1/ticker")
    async def ticker_endpoint(request: Request) -> JSONResponse:
        snapshot: DataSnapshot = app.state.snapshot
        states = _parse_states(request.query_params.get("states"))
        try:
            rows = ingestion.latest_ticker(
                states, snapshot.ticker_cases, snapshot.ticker_deaths
            )
        except IngestionError as exc:
            raise BadRequest("unknown_region", str(exc)) from None
        return JSONResponse(
            [
                {
                    "region": region,
                    "cases": cases,
                    "deaths": deaths,
                    "as_of": day.isoformat(),
                }
                for region, cases, deaths, day in rows
            ]
        )

    @app.get("/api/v1/articles")
    async def articles_endpoint(request: Request) -> JSONResponse:
        snapshot: DataSnapshot = app.state.snapshot
        period = _parse_period(request.query_params.get("period"), "period")
        try:
            k = int(request.query_params.get("k") or 10)
        except ValueError:
            raise BadRequest("bad_k", "k must be an integer") from None
        try:
            hits = ingestion.filter_articles(
                snapshot.articles, period, config.keyword_list, k
            )
        except IngestionError as exc:
            raise BadRequest("bad_articles_query", str(exc)) from None
        return JSONResponse(
            [
                {
                    "id": a.id,
                    "published": a.published.isoformat(),
                    "title": a.title,
                    "abstract": a.abstract,
                    "url": a.url,
                }
                for a in hits
            ]
        )

    @app.post("/admin/refresh")
    async def refresh_endpoint() -> JSONResponse:
        manifest = run_refresh(app)
        return JSONResponse(
            {
                "refreshed": True,
                "data_digest": app.state.snapshot.digest,
                "sources": [
                    {"name": r.name, "stale": r.stale, "error": r.error}
                    for r in manifest
                ],
            }
        )

    @app.post("/admin/invalidate")
    async def invalidate_endpoint(request: Request) -> JSONResponse:
        kind = (request.query_params.get("kind") or "").upper()
        if kind not in ("MAP", "TIMELINE"):
            raise BadRequest("bad_kind", f"unknown kind {kind!r}")
        removed = app.state.cache.invalidate(kind)
        return JSONResponse({"invalidated": kind, "removed": removed})

    if config.static_dir is not None and config.static_dir.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True))

    return app


def run_refresh(app: FastAPI) -> list[ingestion.FetchResult]:
    """Fetch sources (if a manifest exists), then atomically swap in a freshly
    loaded snapshot. Exclusive with itself; readers keep the old snapshot."""
    config: ServiceConfig = app.state.config
    with app.state.refresh_lock:
        manifest: list[ingestion.FetchResult] = []
        sources_path = config.data_dir / "sources.json"
        if sources_path.exists():
            raw = json.loads(sources_path.read_text(encoding="utf-8"))
            descriptors = [ingestion.SourceDescriptor(**d) for d in raw]
            manifest = ingestion.fetch_sources(descriptors, config.data_dir)
            for result in manifest:
                if result.stale:
                    log.warning("source %s stale: %s", result.name, result.error)
        app.state.snapshot = load_snapshot(config.data_dir)
        return manifest
