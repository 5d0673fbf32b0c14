"""CSV ingestion and result writers."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .domain import LandUseClass, LocationClass, Parcel

PARCEL_HEADER = ("parcel_id", "neighborhood", "land_use_class", "location_class",
                 "lot_area_m2", "ilr", "year_built", "current_archetype_id", "x_m", "y_m",
                 "buildings")
_REQUIRED = PARCEL_HEADER[:8]

PATHWAY_HEADER = ("neighborhood", "climate", "grid", "development", "adoption", "decade",
                  "total_kwh", "total_tco2e", "units", "floor_area_m2", "tco2e_per_unit",
                  "tco2e_per_m2")
PARCEL_OUT_HEADER = ("parcel_id", "neighborhood", "climate", "grid", "development",
                     "adoption", "decade", "archetype_id", "units", "floor_area_m2",
                     "total_kwh", "total_tco2e")
PREMIUM_HEADER = ("neighborhood", "climate", "grid", "adoption", "decade", "premium_tco2e")
ADOPTION_HEADER = ("climate", "grid", "development", "adoption", "decade", "technology",
                   "chosen", "mandated", "cumulative")


class DataError(ValueError):
    """Input data failed to parse or validate."""


def fmt(x: float) -> str:
    """Six significant digits, integers without a trailing '.0'."""
    if isinstance(x, int):
        return str(x)
    s = f"{x:.6g}"
    return "0" if s == "-0" else s


def load_parcels(path: str | Path) -> list[Parcel]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in _REQUIRED if c not in (reader.fieldnames or ())]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        out = []
        for row_no, row in enumerate(reader, start=2):
            try:
                ilr_raw = row["ilr"].strip()
                if not ilr_raw:
                    raise ValueError("missing ILR")
                try:
                    ilr = float(ilr_raw)
                except ValueError:
                    raise ValueError(f"non-numeric ILR {ilr_raw!r}") from None
                if ilr < 0:
                    raise ValueError(f"negative ILR {ilr}")
                lot = float(row["lot_area_m2"])
                if lot <= 0:
                    raise ValueError(f"lot area must be positive, got {lot}")
                out.append(Parcel(
                    id=row["parcel_id"],
                    neighborhood=row["neighborhood"],
                    land_use_class=LandUseClass(row["land_use_class"]),
                    location_class=LocationClass(row["location_class"]),
                    lot_area=lot,
                    ilr=ilr,
                    year_built=int(row["year_built"]),
                    current_archetype=row["current_archetype_id"],
                    x=float(row.get("x_m") or 0.0),
                    y=float(row.get("y_m") or 0.0),
                    buildings=int(row.get("buildings") or 1),
                ))
            except ValueError as exc:
                raise DataError(f"{path}: row {row_no}: {exc}") from None
    return out


def write_parcels(parcels: Iterable[Parcel], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PARCEL_HEADER)
        for p in parcels:
            w.writerow([p.id, p.neighborhood, p.land_use_class.value, p.location_class.value,
                        p.lot_area, p.ilr, p.year_built, p.current_archetype, p.x, p.y,
                        p.buildings])


def write_rows(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def write_json(path: str | Path, payload) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path
