"""Tunable simulation constants."""

from __future__ import annotations

from dataclasses import dataclass, field

DEFAULT_SHARED_KEY = bytes(range(32))  # pre-shared simulation key, not a secret


@dataclass(frozen=True)
class SimConfig:
    threshold_mm: float = 10.0        # detection threshold on the depth map
    cell_m: float = 0.5               # scanner cell size
    dedup_radius_m: float = 1.0       # same-arc report merge distance
    p2p_range_m: float = 20.0         # warning broadcast radius (closed bound)
    loss_timeout_ms: int = 500        # silence before a connection is declared lost
    phase_latency_ms: int = 100       # one request/response exchange per phase
    transfer_budget: int = 4          # envelopes per exchange while connected
    shared_key: bytes = field(default=DEFAULT_SHARED_KEY)
