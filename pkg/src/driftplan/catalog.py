"""Debris catalog files.

A catalog is a comma-separated text file: one ``# epoch:`` comment
naming the date the node values refer to, a header line, then one row
per debris with kilometre/degree units::

    # epoch: 2016-01-01T00:00:00Z
    id,a_km,e,i_deg,raan_deg
    1,7030.5,0.0001,98.0,221.1

The parsed object keeps the file's literal numbers so a written
catalog re-parses to identical values; orbital elements in SI units
are derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import CatalogError
from .orbital import OrbitalElements
from .units import KM, deg_to_rad

HEADER = ("id", "a_km", "e", "i_deg", "raan_deg")
_EPOCH_PREFIX = "# epoch:"


@dataclass(frozen=True)
class CatalogRow:
    """One debris as written in the file (km and degrees)."""

    a_km: float
    e: float
    i_deg: float
    raan_deg: float

    def elements(self) -> OrbitalElements:
        return OrbitalElements(self.a_km * KM, self.e,
                               deg_to_rad(self.i_deg),
                               deg_to_rad(self.raan_deg))


@dataclass(frozen=True)
class Catalog:
    """Parsed debris catalog: epoch label plus rows keyed by id."""

    epoch: str
    rows: dict[int, CatalogRow]

    def __len__(self) -> int:
        return len(self.rows)

    def elements(self) -> dict[int, OrbitalElements]:
        return {k: row.elements() for k, row in self.rows.items()}


def _parse_rows(path: Path) -> tuple[str, list[tuple[int, str]]]:
    """Epoch label and (line number, text) of every data row."""
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise CatalogError(f"{path}: {exc.strerror or exc}") from exc
    epoch = ""
    data: list[tuple[int, str]] = []
    header_seen = False
    for no, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            if text.lower().startswith(_EPOCH_PREFIX):
                epoch = text[len(_EPOCH_PREFIX):].strip()
            continue
        if not header_seen:
            got = tuple(f.strip() for f in text.split(","))
            if got != HEADER:
                raise CatalogError(
                    f"{path}:{no}: header must be {','.join(HEADER)!r}, "
                    f"got {text!r}")
            header_seen = True
            continue
        data.append((no, text))
    if not header_seen:
        raise CatalogError(f"{path}: missing header line")
    return epoch, data


def _parse_row(path: Path, no: int, text: str,
               seen: set[int]) -> tuple[int, CatalogRow]:
    fields = [f.strip() for f in text.split(",")]
    if len(fields) != len(HEADER):
        raise CatalogError(
            f"{path}:{no}: expected {len(HEADER)} fields, got {len(fields)}")
    try:
        debris_id = int(fields[0])
    except ValueError:
        raise CatalogError(
            f"{path}:{no}: field 'id' must be an integer, "
            f"got {fields[0]!r}") from None
    if debris_id < 1:
        raise CatalogError(f"{path}:{no}: field 'id' must be >= 1 "
                           f"(0 is reserved), got {debris_id}")
    if debris_id in seen:
        raise CatalogError(f"{path}:{no}: duplicate id {debris_id}")
    values = []
    for name, raw in zip(HEADER[1:], fields[1:]):
        try:
            values.append(float(raw))
        except ValueError:
            raise CatalogError(
                f"{path}:{no}: field {name!r} must be a number, "
                f"got {raw!r}") from None
    row = CatalogRow(*values)
    try:
        row.elements()
    except Exception as exc:
        raise CatalogError(f"{path}:{no}: {exc}") from exc
    return debris_id, row


def parse_catalog(path: str | Path) -> Catalog:
    """Read and validate a catalog file.

    Raises:
        CatalogError: unreadable file or first malformed row, with the
            file, line and field named.
    """
    path = Path(path)
    epoch, data = _parse_rows(path)
    if not data:
        raise CatalogError(f"{path}: catalog has no debris rows")
    rows: dict[int, CatalogRow] = {}
    for no, text in data:
        debris_id, row = _parse_row(path, no, text, set(rows))
        rows[debris_id] = row
    return Catalog(epoch=epoch, rows=rows)


def validate_catalog(path: str | Path) -> tuple[str, list[tuple[int, str, object]]]:
    """Row-by-row validation for reporting.

    Returns the epoch label and one ``(line, status, payload)`` triple
    per data row — status ``"ok"`` with ``(id, CatalogRow)`` payload, or
    status ``"error"`` with the message.  Raises CatalogError only for
    file-level problems (unreadable, missing header).
    """
    path = Path(path)
    epoch, data = _parse_rows(path)
    results: list[tuple[int, str, object]] = []
    seen: set[int] = set()
    for no, text in data:
        try:
            debris_id, row = _parse_row(path, no, text, seen)
        except CatalogError as exc:
            results.append((no, "error", str(exc)))
            continue
        seen.add(debris_id)
        results.append((no, "ok", (debris_id, row)))
    return epoch, results


def write_catalog(catalog: Catalog, path: str | Path) -> None:
    """Write ``catalog`` so that it re-parses to identical values."""
    lines = [f"{_EPOCH_PREFIX} {catalog.epoch}".rstrip(),
             ",".join(HEADER)]
    for debris_id in catalog.rows:
        r = catalog.rows[debris_id]
        lines.append(f"{debris_id},{r.a_km!r},{r.e!r},{r.i_deg!r},"
                     f"{r.raan_deg!r}")
    Path(path).write_text("\n".join(lines) + "\n")
