"""Visualization payload generation: choropleth map data and synchronized
dual-timeline data, serialized as canonical JSON for the client."""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .ingestion import DailyRecord
from .mln import Band, CommunityAllocation
from .periods import Period

MAX_TIMELINE_STATES = 5

# diverging red -> green, most severe first
BAND_COLORS = {
    Band.SPIKE: "#b2182b",
    Band.HIGH_RISE: "#ef8a62",
    Band.RISE: "#fddbc7",
    Band.NO_CHANGE: "#f7f7f7",
    Band.DIP: "#d9f0d3",
    Band.LARGE_DIP: "#7fbf7b",
    Band.BIG_DIP: "#1b7837",
}


class VizError(Exception):
    pass


@dataclass(frozen=True)
class VizRequest:
    kind: str  # "MAP" | "TIMELINE"
    params: tuple[tuple[str, str], ...]  # sorted by name, normalized values

    def __post_init__(self) -> None:
        if self.kind not in ("MAP", "TIMELINE"):
            raise VizError(f"unknown request kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(self.params))


def canonical_key(req: VizRequest) -> str:
    """kind + "|" + sorted name=value pairs joined by "&".

    The full string is the logical cache key, so distinct requests can never
    collide; hashing happens only inside the table/filenames.
    """
    names = [n for n, _ in req.params]
    if names != sorted(names):
        raise VizError(f"params not sorted by name: {names}")
    if len(set(names)) != len(names):
        raise VizError(f"duplicate param names: {names}")
    for name, value in req.params:
        if "&" in name + value or "=" in name or "|" in name + value:
            raise VizError(f"unnormalized param {name}={value!r}")
    return req.kind + "|" + "&".join(f"{n}={v}" for n, v in req.params)


def generate_map_payload(alloc: CommunityAllocation, title: str) -> dict:
    """One colored entry per county with census-enriched hover text."""
    if not alloc.rows:
        raise VizError("empty allocation")
    seen: set[str] = set()
    counties = []
    for row in alloc.rows:
        if row.fips in seen:
            raise VizError(f"duplicate fips {row.fips} in allocation")
        seen.add(row.fips)
        c = row.census
        pct = "inf" if math.isinf(row.percent_change) else f"{row.percent_change:.1f}"
        hover = (
            f"{c.county_name}, {c.state} — {row.band.value} ({pct}% change) | "
            f"population density {c.population_density:g}/sq mi | "
            f"median household income ${c.median_household_income:g} | "
            f"high school {c.pct_high_school:g}%"
        )
        counties.append(
            {
                "fips": row.fips,
                "band": row.band.value,
                "color": BAND_COLORS[row.band],
                "hover": hover,
            }
        )
    return {
        "kind": "map",
        "title": title,
        "legend": {band.value: color for band, color in BAND_COLORS.items()},
        "counties": counties,
    }


def generate_timeline_payload(
    table: Sequence[DailyRecord],
    states: Sequence[str],
    feat_left: str,
    feat_right: str,
    date_range: tuple[dt.date, dt.date],
) -> dict:
    """Two feature series per state over a shared daily date axis; missing
    values are nulls."""
    if not 1 <= len(states) <= MAX_TIMELINE_STATES:
        raise VizError(f"need 1..{MAX_TIMELINE_STATES} states, got {len(states)}")
    known = {name for rec in table for name in rec.features}
    for feat in (feat_left, feat_right):
        if feat not in known:
            raise VizError(f"unknown feature {feat!r}")
    start, end = date_range
    if start > end:
        raise VizError(f"bad date range {start}..{end}")
    dates = [start + dt.timedelta(days=i) for i in range((end - start).days + 1)]
    cells: dict[tuple[str, dt.date], Mapping[str, Optional[float]]] = {
        (rec.region_id, rec.date): rec.features for rec in table
    }

    def series(feat: str) -> dict[str, list[Optional[float]]]:
        return {
            state: [cells.get((state, day), {}).get(feat) for day in dates]
            for state in states
        }

    return {
        "kind": "timeline",
        "dates": [d.isoformat() for d in dates],
        "left": {"feature": feat_left, "series": series(feat_left)},
        "right": {"feature": feat_right, "series": series(feat_right)},
    }


def to_canonical_bytes(payload: dict) -> bytes:
    """Deterministic JSON serialization: sorted keys, fixed separators."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
