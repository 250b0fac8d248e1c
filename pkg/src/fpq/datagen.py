"""Synthetic benchmark data: an OSM-style map graph plus taxi order tables.

The map graph hangs id/lat/lon (and a tourism tag for a small subset) off
point entities, and links roughly three quarters of the points into roads via
way -> nd -> ref chains.  A point's id value is the point constant itself, so
road-membership tests (incoming `ref`) and way navigation (`ref` then inverse
`id`) both resolve on the same entity.

Order tables reference the generated coordinates.  Five fixed
(date, lon, lat, driver) coincidences are planted in both Orders and GPS at
every size so the four-way federated join stays small and size-stable.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

CANONICAL_DATE = "2016-04-01"
PAPER_SCALE_POINTS = 2400
DEFAULT_SEED = 20160401

ORDERS_HEADER = (
    "ID", "Time", "Driver ID", "Vehicle ID", "Passenger ID",
    "Start Point", "End Point",
)
GPS_HEADER = ("Date", "Lon", "Lat", "Driver ID")

_TAG_EVERY = 20     # every 20th point is a tourist attraction
_ROAD_SKIP = 4      # every 4th point stays off the road network
_WAY_SIZE = 10
_PLANTED = 5


@dataclass(frozen=True)
class MapPoint:
    node: str
    lon: str
    lat: str
    on_road: bool
    tagged: bool


@dataclass(frozen=True)
class MapSpec:
    seed: int
    n_points: int
    points: tuple[MapPoint, ...]

    def planted_points(self) -> list[MapPoint]:
        on_road = [p for p in self.points if p.on_road]
        return on_road[:_PLANTED]


def gen_map_graph(seed: int, n_points: int) -> tuple[str, MapSpec]:
    """Deterministic map graph text plus its point manifest."""
    if n_points < 2:
        raise ValueError("a map needs at least 2 points")
    rng = random.Random(seed)
    lines: list[str] = [f"# synthetic map graph (seed={seed}, points={n_points})"]
    points: list[MapPoint] = []
    for i in range(n_points):
        node = f"n{i}"
        lon = f"117.{rng.randint(10, 99)}{i:05d}"
        lat = f"39.{rng.randint(10, 99)}{i:05d}"
        tagged = i % _TAG_EVERY == 0
        on_road = i % _ROAD_SKIP != _ROAD_SKIP - 1
        points.append(MapPoint(node, lon, lat, on_road, tagged))
        lines.append(f"osm node {node} .")
        lines.append(f"{node} id {node} .")
        lines.append(f"{node} lat {lat} .")
        lines.append(f"{node} lon {lon} .")
        if tagged:
            tag = f"t{i}"
            lines.append(f"{node} tag {tag} .")
            lines.append(f"{tag} k tourism .")
            lines.append(f"{tag} v attraction_{i} .")
    road_points = [p for p in points if p.on_road]
    for j in range(0, len(road_points), _WAY_SIZE):
        way = f"w{j // _WAY_SIZE}"
        lines.append(f"osm way {way} .")
        lines.append(f"{way} id {way} .")
        for k, point in enumerate(road_points[j : j + _WAY_SIZE]):
            nd = f"d{j // _WAY_SIZE}_{k}"
            lines.append(f"{way} nd {nd} .")
            lines.append(f"{nd} ref {point.node} .")
    return "\n".join(lines) + "\n", MapSpec(seed, n_points, tuple(points))


def _noise_date(rng: random.Random) -> str:
    while True:
        date = f"2016-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        if date != CANONICAL_DATE:
            return date


def gen_orders(
    seed: int,
    n_tuples: int,
    spec: MapSpec,
    orders_out: TextIO,
    gps_out: TextIO,
) -> None:
    """Write Orders and GPS CSVs, n_tuples data rows each.

    Roughly 10% of Orders rows fall on the canonical date.  Noise drivers are
    disjoint from planted drivers and noise GPS rows avoid the canonical date,
    so the planted coincidences are the only GPS/Orders matches on it.
    """
    if n_tuples < 0:
        raise ValueError("n_tuples must be non-negative")
    rng = random.Random(seed * 31 + 7)
    planted = spec.planted_points()
    orders = csv.writer(orders_out)
    gps = csv.writer(gps_out)
    orders.writerow(ORDERS_HEADER)
    gps.writerow(GPS_HEADER)
    for i in range(n_tuples):
        if i < len(planted):
            point = planted[i]
            driver = str(100 + i)
            orders.writerow(
                [str(i + 1), CANONICAL_DATE, driver, f"V{100 + i}", f"P{i}",
                 point.lon, point.lat]
            )
            gps.writerow([CANONICAL_DATE, point.lon, point.lat, driver])
            continue
        point = spec.points[rng.randrange(len(spec.points))]
        date = CANONICAL_DATE if rng.random() < 0.1 else _noise_date(rng)
        driver = str(200 + rng.randrange(800))
        orders.writerow(
            [str(i + 1), date, driver, f"V{rng.randrange(1000)}",
             f"P{rng.randrange(10000)}", point.lon, point.lat]
        )
        gps_point = spec.points[rng.randrange(len(spec.points))]
        gps.writerow(
            [_noise_date(rng), gps_point.lon, gps_point.lat,
             str(200 + rng.randrange(800))]
        )


def write_benchmark_data(
    out_dir: str | Path,
    seed: int = DEFAULT_SEED,
    n_points: int = PAPER_SCALE_POINTS,
    n_tuples: int = 1000,
) -> dict[str, Path]:
    """Materialize map.nt, orders.csv, gps.csv and relations.json in out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text, spec = gen_map_graph(seed, n_points)
    graph_path = out / "map.nt"
    graph_path.write_text(text, encoding="utf-8")
    orders_path = out / "orders.csv"
    gps_path = out / "gps.csv"
    with open(orders_path, "w", encoding="utf-8", newline="") as fo, open(
        gps_path, "w", encoding="utf-8", newline=""
    ) as fg:
        gen_orders(seed, n_tuples, spec, fo, fg)
    manifest_path = out / "relations.json"
    manifest_path.write_text(
        '{\n  "relations": [\n'
        '    {"name": "Orders", "path": "orders.csv"},\n'
        '    {"name": "GPS", "path": "gps.csv"}\n'
        "  ]\n}\n",
        encoding="utf-8",
    )
    return {
        "graph": graph_path,
        "orders": orders_path,
        "gps": gps_path,
        "manifest": manifest_path,
    }
