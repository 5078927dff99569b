"""Central pothole registry.

Stores one record per physical pothole, keyed by a unique identification
number minted here and nowhere else.  Every transaction for a pothole goes
through that id.  Repeat reports of the same hole (same arc, offsets within
the dedup radius) merge into the existing record: the stored depth becomes
the maximum ever reported, and every report -- new or repeat -- appends an
UpdateEvent, which is the raw material for traffic-intensity ranking.

Dump format (CSV): pothole_id, arc_id, offset_m, depth_mm, intensity,
first_seen_ms, last_seen_ms.  Update events: pothole_id, vehicle_id,
timestamp_ms.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .detection import PotholeDetection
from .network import StreetNetwork, UnknownArcError

DEFAULT_DEDUP_RADIUS_M = 1.0


class UnknownPotholeError(LookupError):
    pass


@dataclass
class PotholeRecord:
    id: str
    arc: str
    offset_m: float
    depth_mm: float
    intensity: float
    first_seen_ms: int
    last_seen_ms: int

    def as_tuple(self) -> tuple[float, tuple[str, float], float]:
        """The stored (Depth, Location, Intensity) tuple."""
        return (self.depth_mm, (self.arc, self.offset_m), self.intensity)


@dataclass(frozen=True)
class UpdateEvent:
    pothole_id: str
    vehicle_id: str
    timestamp_ms: int


class PotholeRegistry:
    """Deduplicating pothole store plus append-only update-event log.

    Constructed with the street network it validates against; a registry
    rebuilt from a CSV dump without a network is read-only (lookups work,
    ingest does not).
    """

    def __init__(self, net: StreetNetwork | None,
                 dedup_radius_m: float = DEFAULT_DEDUP_RADIUS_M):
        self.net = net
        self.dedup_radius_m = dedup_radius_m
        self.records: dict[str, PotholeRecord] = {}
        self.events: list[UpdateEvent] = []
        self._by_arc: dict[str, list[str]] = {}
        self._next_id = 1

    def __len__(self) -> int:
        return len(self.records)

    def _mint_id(self) -> str:
        pid = str(self._next_id)
        self._next_id += 1
        return pid

    def ingest_report(self, report: PotholeDetection, vehicle_id: str, now_ms: int) -> tuple[str, bool]:
        """Store one decrypted detection report.

        Returns (pothole id, is_new).  A report within the dedup radius of
        an existing record on the same arc merges into it (depth = max of
        old and new, last_seen = now); otherwise a fresh id is minted.
        Either way an UpdateEvent is appended.
        """
        if self.net is None:
            raise ValueError("registry loaded without a network is read-only")
        arc = self.net.arc(report.arc)  # raises UnknownArcError
        if not (0.0 <= report.offset_m <= arc.length_m):
            raise ValueError(
                f"offset {report.offset_m} outside arc {arc.id!r} of length {arc.length_m}")
        if not (math.isfinite(report.depth_mm) and report.depth_mm >= 0.0):
            raise ValueError(f"negative or non-finite depth {report.depth_mm}")

        match: PotholeRecord | None = None
        best = self.dedup_radius_m
        for pid in self._by_arc.get(report.arc, []):
            rec = self.records[pid]
            dist = abs(rec.offset_m - report.offset_m)
            if dist <= best:
                # nearest wins; exact ties resolve to the earliest-minted record
                if match is None or dist < best:
                    match, best = rec, dist

        if match is not None:
            match.depth_mm = max(match.depth_mm, report.depth_mm)
            match.last_seen_ms = now_ms
            self.events.append(UpdateEvent(match.id, vehicle_id, now_ms))
            return match.id, False

        pid = self._mint_id()
        self.records[pid] = PotholeRecord(
            id=pid, arc=report.arc, offset_m=report.offset_m,
            depth_mm=report.depth_mm, intensity=report.intensity,
            first_seen_ms=now_ms, last_seen_ms=now_ms)
        self._by_arc.setdefault(report.arc, []).append(pid)
        self.events.append(UpdateEvent(pid, vehicle_id, now_ms))
        return pid, True

    def potholes_on_arc(self, arc_id: str) -> list[PotholeRecord]:
        """Records on the given arc, in minting order (empty list allowed)."""
        if self.net is not None:
            self.net.arc(arc_id)
        return [self.records[pid] for pid in self._by_arc.get(arc_id, [])]

    def lookup(self, pothole_id: str) -> PotholeRecord:
        try:
            return self.records[pothole_id]
        except KeyError:
            raise UnknownPotholeError(pothole_id) from None

    # -- persistence ------------------------------------------------------

    RECORD_FIELDS = ["pothole_id", "arc_id", "offset_m", "depth_mm", "intensity",
                     "first_seen_ms", "last_seen_ms"]
    EVENT_FIELDS = ["pothole_id", "vehicle_id", "timestamp_ms"]

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.RECORD_FIELDS)
            for pid in sorted(self.records, key=int):
                r = self.records[pid]
                w.writerow([r.id, r.arc, r.offset_m, r.depth_mm, r.intensity,
                            r.first_seen_ms, r.last_seen_ms])

    def write_events_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.EVENT_FIELDS)
            for e in self.events:
                w.writerow([e.pothole_id, e.vehicle_id, e.timestamp_ms])

    @classmethod
    def read_csv(cls, path: str | Path, net: StreetNetwork | None = None,
                 dedup_radius_m: float = DEFAULT_DEDUP_RADIUS_M) -> "PotholeRegistry":
        reg = cls(net, dedup_radius_m)
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != cls.RECORD_FIELDS:
                raise ValueError(f"{path}: expected columns {cls.RECORD_FIELDS}, "
                                 f"got {reader.fieldnames}")
            for row in reader:
                rec = PotholeRecord(
                    id=row["pothole_id"], arc=row["arc_id"],
                    offset_m=float(row["offset_m"]), depth_mm=float(row["depth_mm"]),
                    intensity=float(row["intensity"]),
                    first_seen_ms=int(row["first_seen_ms"]),
                    last_seen_ms=int(row["last_seen_ms"]))
                if net is not None:
                    net.arc(rec.arc)
                if rec.id in reg.records:
                    raise ValueError(f"{path}: duplicate pothole id {rec.id!r}")
                reg.records[rec.id] = rec
                reg._by_arc.setdefault(rec.arc, []).append(rec.id)
                reg._next_id = max(reg._next_id, int(rec.id) + 1)
        for ids in reg._by_arc.values():
            ids.sort(key=int)  # restore minting order regardless of row order
        return reg


def read_events_csv(path: str | Path) -> list[UpdateEvent]:
    events = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != PotholeRegistry.EVENT_FIELDS:
            raise ValueError(f"{path}: expected columns {PotholeRegistry.EVENT_FIELDS}, "
                             f"got {reader.fieldnames}")
        for row in reader:
            events.append(UpdateEvent(row["pothole_id"], row["vehicle_id"],
                                      int(row["timestamp_ms"])))
    return events
