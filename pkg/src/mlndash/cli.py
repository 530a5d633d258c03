"""Command-line entry points: `ingest`, `mln`, and `mlndash`."""

from __future__ import annotations

import datetime as dt
import json
import os
import sys
from pathlib import Path

import click

from . import demo_data as demo
from . import ingestion
from . import mln as mln_mod
from .periods import Period


@click.group()
def ingest() -> None:
    """Data acquisition and cleaning commands."""


@ingest.command("refresh")
@click.option("--sources", "sources_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def ingest_refresh(sources_path: str, out_dir: str) -> None:
    """Fetch every source in the manifest into the output directory."""
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    raw = json.loads(Path(sources_path).read_text(encoding="utf-8"))
    descriptors = [ingestion.SourceDescriptor(**d) for d in raw]
    manifest = ingestion.fetch_sources(descriptors, Path(out_dir))
    for result in manifest:
        status = "stale" if result.stale else "ok"
        click.echo(f"{result.name}\t{status}\t{result.path}")
    if any(r.stale for r in manifest):
        sys.exit(1)


@ingest.command("clean")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest_clean(in_path: str, out_path: str) -> None:
    """Repair cumulative county case/death counts to be non-decreasing."""
    cases, deaths = ingestion.read_county_daily(Path(in_path))
    cleaned_cases = {f: ingestion.clean_cumulative(s) for f, s in cases.items()}
    cleaned_deaths = {f: ingestion.clean_cumulative(s) for f, s in deaths.items()}
    ingestion.write_county_daily(cleaned_cases, cleaned_deaths, Path(out_path))
    click.echo(f"cleaned {len(cleaned_cases)} county series -> {out_path}")


@ingest.command("consolidate")
@click.option("--in", "in_paths", required=True, multiple=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def ingest_consolidate(in_paths: tuple[str, ...], out_path: str) -> None:
    """Merge per-source state tables into one table with the union of features."""
    tables = [ingestion.read_state_table(Path(p)) for p in in_paths]
    merged = ingestion.consolidate(tables)
    ingestion.write_state_table(merged, Path(out_path))
    click.echo(f"consolidated {len(in_paths)} tables, {len(merged)} rows -> {out_path}")


@click.group()
def mln() -> None:
    """Multilayer-network analysis commands."""


@mln.command("analyze")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def mln_analyze(config_path: str, out_path: str) -> None:
    """Run the category-II pipeline from an analysis configuration file."""
    cfg = json.loads(Path(config_path).read_text(encoding="utf-8"))
    pa = Period(
        dt.date.fromisoformat(cfg["period_a"]["start"]),
        dt.date.fromisoformat(cfg["period_a"]["end"]),
    )
    pb = Period(
        dt.date.fromisoformat(cfg["period_b"]["start"]),
        dt.date.fromisoformat(cfg["period_b"]["end"]),
    )
    cases, deaths = ingestion.read_county_daily(Path(cfg["inputs"]["counties"]))
    source = deaths if cfg["feature"] == "new_deaths" else cases
    county_new = {
        fips: ingestion.daily_new_from_cumulative(ingestion.clean_cumulative(s))
        for fips, s in source.items()
    }
    census = ingestion.read_census(Path(cfg["inputs"]["census"]))
    _, part, bands, alloc = mln_mod.analyze(
        county_new, census, cfg["feature"], pa, pb, int(cfg.get("seed", 42))
    )
    mln_mod.write_allocation(alloc, Path(out_path))
    click.echo(
        f"{len(alloc.rows)} counties in {part.num_communities} communities -> {out_path}"
    )
    for cid in sorted(bands):
        click.echo(f"  community {cid}: {bands[cid].value}")


@click.group()
def mlndash() -> None:
    """Dashboard service commands."""


@mlndash.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True))
def mlndash_serve(config_path: str | None) -> None:
    """Run the HTTP service (MLNDASH_CONFIG is the config fallback)."""
    import uvicorn

    from .service import ServiceConfig, create_app

    path = config_path or os.environ.get("MLNDASH_CONFIG")
    if not path:
        raise click.UsageError("pass --config or set MLNDASH_CONFIG")
    config = ServiceConfig.load(Path(path))
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


@mlndash.command("demo-data")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=20200318, show_default=True)
def mlndash_demo_data(out_dir: str, seed: int) -> None:
    """Emit the synthetic fixture set (spring-break and vaccination regimes)."""
    demo.generate_demo_data(Path(out_dir), seed=seed)
    click.echo(f"demo fixtures written to {out_dir}")
