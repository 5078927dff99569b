"""Location-bound report envelopes.

A detection report travels as an envelope whose keystream is derived from
(shared key, location, fresh 128-bit nonce), so the payload only opens at
the location it claims to come from.  Decryption checks the location tag,
verifies payload integrity, recovers the report and discards the nonce.

Wire layout:

    16-byte nonce || 32-byte location tag || 4-byte big-endian payload
    length || ciphertext || 32-byte integrity tag

All primitives are keyed BLAKE2b with domain-separated subkeys derived
from the 256-bit shared secret.  This is a deliberately small reference
construction for a simulator with a pre-shared key; it is NOT a reviewed,
production-grade cipher and must not be used to protect real data.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import random
from dataclasses import dataclass

from .detection import DepthMap, IntensityImage

NONCE_LEN = 16
TAG_LEN = 32
LEN_FIELD = 4

Location = tuple[str, float]  # (arc id, offset in meters)


class GeocryptoError(Exception):
    """Base class for envelope failures."""


class EnvelopeFormatError(GeocryptoError):
    """Envelope bytes are truncated or structurally invalid."""


class LocationMismatchError(GeocryptoError):
    """The claimed location (or the tag key) does not match the envelope."""


class IntegrityError(GeocryptoError):
    """Ciphertext or integrity tag fails verification."""


@dataclass(frozen=True)
class PlainReport:
    depth_map: DepthMap
    intensity_image: IntensityImage
    arc: str
    offset_m: float
    vehicle_id: str
    timestamp_ms: int

    @property
    def location(self) -> Location:
        return (self.arc, self.offset_m)


@dataclass(frozen=True)
class ReportEnvelope:
    nonce: bytes
    location_tag: bytes
    ciphertext: bytes
    integrity_tag: bytes

    def to_bytes(self) -> bytes:
        return (self.nonce + self.location_tag
                + len(self.ciphertext).to_bytes(LEN_FIELD, "big")
                + self.ciphertext + self.integrity_tag)

    @classmethod
    def from_bytes(cls, raw: bytes) -> "ReportEnvelope":
        head = NONCE_LEN + TAG_LEN + LEN_FIELD
        if len(raw) < head + TAG_LEN:
            raise EnvelopeFormatError("envelope truncated")
        nonce = raw[:NONCE_LEN]
        loc_tag = raw[NONCE_LEN:NONCE_LEN + TAG_LEN]
        length = int.from_bytes(raw[NONCE_LEN + TAG_LEN:head], "big")
        if len(raw) != head + length + TAG_LEN:
            raise EnvelopeFormatError(
                f"declared payload length {length} does not match envelope size")
        return cls(nonce, loc_tag, raw[head:head + length], raw[head + length:])


def _subkey(key: bytes, purpose: bytes) -> bytes:
    return hashlib.blake2b(purpose, key=key, digest_size=32).digest()


def _location_bytes(location: Location) -> bytes:
    arc, offset = location
    return json.dumps([arc, float(offset)], separators=(",", ":")).encode()


def _location_tag(key: bytes, location: Location) -> bytes:
    return hashlib.blake2b(_location_bytes(location),
                           key=_subkey(key, b"location-tag"),
                           digest_size=TAG_LEN).digest()


def _keystream(key: bytes, nonce: bytes, location: Location, n: int) -> bytes:
    sub = _subkey(key, b"keystream")
    seed = nonce + _location_bytes(location)
    out = bytearray()
    counter = 0
    while len(out) < n:
        out += hashlib.blake2b(seed + counter.to_bytes(8, "big"),
                               key=sub, digest_size=64).digest()
        counter += 1
    return bytes(out[:n])


def _integrity_tag(key: bytes, nonce: bytes, loc_tag: bytes, ciphertext: bytes) -> bytes:
    mac = hashlib.blake2b(key=_subkey(key, b"integrity"), digest_size=TAG_LEN)
    mac.update(nonce)
    mac.update(loc_tag)
    mac.update(len(ciphertext).to_bytes(LEN_FIELD, "big"))
    mac.update(ciphertext)
    return mac.digest()


def _grid_to_dict(report: PlainReport) -> dict:
    dm, ii = report.depth_map, report.intensity_image
    return {
        "depth_map": {"rows": dm.rows, "cols": dm.cols, "cell_m": dm.cell_m,
                      "depths": dm.depths},
        "intensity_image": {"rows": ii.rows, "cols": ii.cols, "values": ii.values},
        "arc": report.arc,
        "offset_m": report.offset_m,
        "vehicle_id": report.vehicle_id,
        "timestamp_ms": report.timestamp_ms,
    }


def _report_from_dict(raw: dict) -> PlainReport:
    dm = raw["depth_map"]
    ii = raw["intensity_image"]
    return PlainReport(
        depth_map=DepthMap(dm["rows"], dm["cols"], dm["cell_m"],
                           [float(d) for d in dm["depths"]]),
        intensity_image=IntensityImage(ii["rows"], ii["cols"],
                                       [float(v) for v in ii["values"]]),
        arc=raw["arc"], offset_m=float(raw["offset_m"]),
        vehicle_id=raw["vehicle_id"], timestamp_ms=int(raw["timestamp_ms"]))


def encrypt(report: PlainReport, key: bytes, rng: random.Random) -> ReportEnvelope:
    """Seal a report into an envelope bound to its own location."""
    if len(key) != 32:
        raise ValueError("shared key must be 32 bytes")
    nonce = rng.randbytes(NONCE_LEN)
    location = report.location
    payload = json.dumps(_grid_to_dict(report), sort_keys=True,
                         separators=(",", ":")).encode()
    stream = _keystream(key, nonce, location, len(payload))
    ciphertext = bytes(p ^ s for p, s in zip(payload, stream))
    loc_tag = _location_tag(key, location)
    return ReportEnvelope(nonce, loc_tag, ciphertext,
                          _integrity_tag(key, nonce, loc_tag, ciphertext))


def decrypt(env: ReportEnvelope, key: bytes, claimed_location: Location) -> PlainReport:
    """Open an envelope at the claimed location.

    The location tag is checked first, then payload integrity; the nonce
    never appears in the returned report.  A wrong shared key surfaces as
    a location-tag mismatch because the tag is keyed.
    """
    if len(key) != 32:
        raise ValueError("shared key must be 32 bytes")
    if len(env.nonce) != NONCE_LEN or len(env.location_tag) != TAG_LEN \
            or len(env.integrity_tag) != TAG_LEN:
        raise EnvelopeFormatError("envelope field lengths invalid")
    if not hmac.compare_digest(env.location_tag, _location_tag(key, claimed_location)):
        raise LocationMismatchError("location tag check failed")
    expected = _integrity_tag(key, env.nonce, env.location_tag, env.ciphertext)
    if not hmac.compare_digest(env.integrity_tag, expected):
        raise IntegrityError("integrity tag check failed")
    stream = _keystream(key, env.nonce, claimed_location, len(env.ciphertext))
    payload = bytes(c ^ s for c, s in zip(env.ciphertext, stream))
    try:
        raw = json.loads(payload.decode())
        report = _report_from_dict(raw)
    except (ValueError, KeyError, TypeError) as exc:
        raise IntegrityError(f"payload did not decode: {exc}") from exc
    return report
