"""Central server: envelope intake and road-condition queries.

Each accepted envelope follows the fixed path decrypt -> ingest -> re-weight
the affected arc, so the weighted network is always consistent with the
registry.  Commands are processed one at a time (the simulator's event
loop serializes them), which makes every query response a view of exactly
one registry/weights snapshot; responses carry that snapshot's sequence
number.  Query dispatch is a fixed request-kind -> handler mapping; there
is no cost-based planning.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import geocrypto, routing, weighting
from .detection import PotholeDetection
from .geocrypto import GeocryptoError, Location, ReportEnvelope
from .network import StreetNetwork, UnknownArcError, UnknownNodeError
from .registry import PotholeRegistry
from .routing import Route, UnreachableError


@dataclass
class ServerStats:
    envelopes_accepted: int = 0
    envelopes_rejected: int = 0
    queries_answered: int = 0
    queries_failed: int = 0


@dataclass(frozen=True)
class RouteRequest:
    source: str
    dest: str


@dataclass(frozen=True)
class ConditionRequest:
    arc: str


@dataclass(frozen=True)
class RouteResponse:
    route: Route
    snapshot_seq: int


@dataclass(frozen=True)
class ConditionResponse:
    arc: str
    weight: float
    potholes: tuple[str, ...]
    snapshot_seq: int


@dataclass(frozen=True)
class ErrorResponse:
    message: str
    snapshot_seq: int


class Server:
    def __init__(self, net: StreetNetwork, registry: PotholeRegistry,
                 wnet: weighting.WeightedNetwork, shared_key: bytes):
        self.net = net
        self.registry = registry
        self.wnet = wnet
        self.shared_key = shared_key
        self.stats = ServerStats()
        self.snapshot_seq = 0

    def receive_envelope(self, env: ReportEnvelope, claimed_location: Location,
                         vehicle_id: str, now_ms: int) -> tuple[str, bool] | None:
        """Decrypt, ingest and re-weight.  Returns (pothole id, is_new), or
        None when the envelope fails decryption and is dropped."""
        try:
            report = geocrypto.decrypt(env, self.shared_key, claimed_location)
        except GeocryptoError:
            self.stats.envelopes_rejected += 1
            return None
        detection = PotholeDetection(
            arc=report.arc,
            offset_m=report.offset_m,
            depth_mm=max(report.depth_map.depths, default=0.0),
            intensity=(sum(report.intensity_image.values) / len(report.intensity_image.values)
                       if report.intensity_image.values else 1.0),
        )
        outcome = self.registry.ingest_report(detection, vehicle_id, now_ms)
        weighting.apply_update(self.wnet, report.arc, self.registry)
        self.stats.envelopes_accepted += 1
        self.snapshot_seq += 1
        return outcome

    def query(self, request: RouteRequest | ConditionRequest):
        """Answer a route or condition query against the current snapshot."""
        try:
            if isinstance(request, RouteRequest):
                rt = routing.route(self.wnet, request.source, request.dest)
                self.stats.queries_answered += 1
                return RouteResponse(rt, self.snapshot_seq)
            if isinstance(request, ConditionRequest):
                w = self.wnet.weight(request.arc)
                pids = tuple(rec.id for rec in self.registry.potholes_on_arc(request.arc))
                self.stats.queries_answered += 1
                return ConditionResponse(request.arc, w, pids, self.snapshot_seq)
            raise TypeError(f"unsupported request {request!r}")
        except (UnknownNodeError, UnknownArcError, UnreachableError, TypeError) as exc:
            self.stats.queries_failed += 1
            return ErrorResponse(f"{type(exc).__name__}: {exc}", self.snapshot_seq)
