"""Synthetic fixture generator: county/state COVID-style data encoding the
spring-break surge and the vaccination-drive decline, plus census, world
aggregates, articles, and a source manifest for refresh."""

from __future__ import annotations

import csv
import datetime as dt
import json
import random
import shutil
from pathlib import Path

from .ingestion import CumulativeSeries, write_county_daily

START = dt.date(2020, 1, 20)
END = dt.date(2021, 3, 31)

# canonical scenario windows used by docs, tests, and the frontend presets
SPRING_BREAK_PA = ("2020-02-18", "2020-03-02")
SPRING_BREAK_PB = ("2020-03-20", "2020-04-02")
VACCINATION_PA = ("2020-09-15", "2020-09-28")
VACCINATION_PB = ("2021-01-15", "2021-01-28")

_STATES = {
    "CA": "06",
    "TX": "48",
    "FL": "12",
    "NY": "36",
    "WV": "54",
}
_COUNTIES_PER_STATE = 12


def generate_demo_data(out_dir: Path, seed: int = 20200318) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    counties = []
    for state, prefix in _STATES.items():
        for i in range(_COUNTIES_PER_STATE):
            counties.append((f"{prefix}{2 * i + 1:03d}", state))

    days = [START + dt.timedelta(days=n) for n in range((END - START).days + 1)]

    cases: dict[str, CumulativeSeries] = {}
    deaths: dict[str, CumulativeSeries] = {}
    daily_new: dict[str, dict[dt.date, int]] = {}
    for fips, state in counties:
        base = rng.uniform(6, 30)
        # ~85% of counties follow each scenario regime, the rest run counter
        spring_mult = rng.uniform(2.6, 6.0) if rng.random() < 0.85 else rng.uniform(0.9, 1.4)
        vax_mult = rng.uniform(0.10, 0.42) if rng.random() < 0.85 else rng.uniform(0.9, 1.2)

        new_by_day: dict[dt.date, int] = {}
        cum_cases: list[tuple[dt.date, int]] = []
        cum_deaths: list[tuple[dt.date, int]] = []
        total_c = 0
        total_d = 0.0
        for day in days:
            if day < dt.date(2020, 3, 15):
                rate = base
            elif day <= dt.date(2020, 4, 15):
                rate = base * spring_mult
            elif day < dt.date(2020, 9, 1):
                rate = base * 2.0
            elif day < dt.date(2020, 11, 1):
                rate = base * 4.0
            elif day < dt.date(2021, 1, 10):
                rate = base * 3.2
            else:
                rate = base * 4.0 * vax_mult
            new = max(0, int(rate * rng.uniform(0.75, 1.25)))
            new_by_day[day] = new
            total_c += new
            total_d += new * 0.018
            reported = total_c
            # occasional reporting glitch: cumulative revised down, cleaner repairs it
            if rng.random() < 0.01 and reported > 5:
                reported -= rng.randint(1, 4)
            cum_cases.append((day, reported))
            cum_deaths.append((day, int(total_d)))
        daily_new[fips] = new_by_day
        cases[fips] = CumulativeSeries(fips, tuple(cum_cases))
        deaths[fips] = CumulativeSeries(fips, tuple(cum_deaths))

    write_county_daily(cases, deaths, out_dir / "counties.csv")
    _write_census(out_dir / "census.csv", counties, rng)
    _write_states(out_dir / "states.csv", counties, daily_new, days, rng)
    _write_world(out_dir / "world.csv", counties, daily_new, days)
    _write_articles(out_dir / "articles.csv")
    _write_sources(out_dir)


def _write_census(path: Path, counties, rng: random.Random) -> None:
    state_names = {"CA": "California", "TX": "Texas", "FL": "Florida", "NY": "New York", "WV": "West Virginia"}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["fips", "county", "state", "lat", "lon", "population_density",
             "median_household_income", "pct_high_school"]
        )
        for idx, (fips, state) in enumerate(counties):
            writer.writerow(
                [
                    fips,
                    f"{state_names[state]} Demo County {int(fips[2:]):d}",
                    state,
                    round(28.0 + idx * 0.31 % 18, 4),
                    round(-120.0 + idx * 1.07 % 45, 4),
                    round(rng.uniform(12, 2800), 1),
                    round(rng.uniform(32000, 98000), 0),
                    round(rng.uniform(68, 96), 1),
                ]
            )


def _write_states(path: Path, counties, daily_new, days, rng: random.Random) -> None:
    by_state: dict[str, list[str]] = {}
    for fips, state in counties:
        by_state.setdefault(state, []).append(fips)
    vax_start = dt.date(2020, 12, 14)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["state", "date", "cases", "deaths", "new_cases", "new_tests",
             "trips", "vaccinations"]
        )
        for state, members in by_state.items():
            cum_c = 0
            cum_d = 0.0
            for day in days:
                new = sum(daily_new[f][day] for f in members)
                cum_c += new
                cum_d += new * 0.018
                tests = int(new * rng.uniform(8, 12))
                # mobility: collapse in April 2020, slow recovery afterwards
                if day < dt.date(2020, 3, 15):
                    trips = int(950_000 * rng.uniform(0.95, 1.05))
                elif day < dt.date(2020, 5, 1):
                    trips = int(380_000 * rng.uniform(0.9, 1.1))
                else:
                    trips = int(700_000 * rng.uniform(0.9, 1.1))
                if day < vax_start:
                    vax = 0
                else:
                    vax = int((day - vax_start).days * 2400 * rng.uniform(0.9, 1.1))
                writer.writerow(
                    [state, day.isoformat(), cum_c, int(cum_d), new, tests, trips, vax]
                )


def _write_world(path: Path, counties, daily_new, days) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "cases", "deaths"])
        cum = 0
        for day in days:
            cum += sum(daily_new[f][day] for f, _ in counties) * 21
            writer.writerow([day.isoformat(), cum, int(cum * 0.021)])


def _write_articles(path: Path) -> None:
    rows = []
    # a cluster of matching articles across March 2020 (exceeds the top-10 cut)
    for i in range(16):
        day = dt.date(2020, 3, 2) + dt.timedelta(days=2 * i)
        rows.append(
            (
                f"a{i:03d}",
                f"{day.isoformat()}T{8 + i % 10:02d}:30:00",
                f"Coronavirus cases climb in week {i}",
                "Officials report rising covid case counts across several states.",
                f"https://news.example.com/covid/{i}",
            )
        )
    # vaccination-era articles
    for i in range(6):
        day = dt.date(2021, 1, 12) + dt.timedelta(days=3 * i)
        rows.append(
            (
                f"b{i:03d}",
                f"{day.isoformat()}T09:00:00",
                f"Vaccine rollout update {i}",
                "The vaccination campaign expands to more counties.",
                f"https://news.example.com/vaccine/{i}",
            )
        )
    # non-matching noise
    rows.append(
        ("z000", "2020-03-10T12:00:00", "Local sports roundup",
         "Highlights from the weekend games.", "https://news.example.com/sports/1")
    )
    rows.append(
        ("z001", "2021-01-20T12:00:00", "Weather outlook",
         "A cold front moves across the plains.", "https://news.example.com/weather/1")
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "published", "title", "abstract", "url"])
        writer.writerows(rows)


def _write_sources(out_dir: Path) -> None:
    raw_dir = out_dir / "raw"
    raw_dir.mkdir(exist_ok=True)
    names = ["counties", "states", "census", "articles", "world"]
    for name in names:
        shutil.copyfile(out_dir / f"{name}.csv", raw_dir / f"{name}.csv")
    manifest = [
        {
            "name": name,
            "kind": "local_file",
            "location": str(raw_dir / f"{name}.csv"),
            "schedule_hint": "daily",
        }
        for name in names
    ]
    (out_dir / "sources.json").write_text(
        json.dumps(manifest, indent=2), encoding="utf-8"
    )
