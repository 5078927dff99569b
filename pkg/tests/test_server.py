import random

import pytest

from helpers import close, enumerate_min_weight
from potholesim.detection import DepthMap, IntensityImage
from potholesim.geocrypto import PlainReport, ReportEnvelope, encrypt
from potholesim.registry import PotholeRegistry
from potholesim.server import (ConditionRequest, ConditionResponse, ErrorResponse,
                               RouteRequest, RouteResponse, Server)
from potholesim.weighting import preprocess

KEY = bytes(range(32))


@pytest.fixture
def server(diamond_net):
    registry = PotholeRegistry(diamond_net)
    wnet = preprocess(diamond_net, registry)
    return Server(diamond_net, registry, wnet, KEY)


def sealed_report(arc, offset, depth, vid="v1", ts=100, key=KEY, rng=None):
    rng = rng or random.Random(1)
    report = PlainReport(DepthMap(1, 2, 0.5, [depth, depth / 2]),
                         IntensityImage(1, 2, [0.4, 0.6]),
                         arc, offset, vid, ts)
    return encrypt(report, key, rng), (arc, offset)


class TestReceiveEnvelope:
    def test_new_pothole_raises_arc_weight(self, server):
        before = server.wnet.weight("ab")
        env, loc = sealed_report("ab", 20.0, 30.0)
        outcome = server.receive_envelope(env, loc, "v1", 100)
        assert outcome == ("1", True)
        # Arc damage by hand: one pothole, avg 30 mm, length 100 m
        assert before == 0.0
        assert server.wnet.weight("ab") == 30.0 * 100.0
        assert server.stats.envelopes_accepted == 1
        assert server.snapshot_seq == 1

    def test_tampered_envelope_dropped(self, server):
        env, loc = sealed_report("ab", 20.0, 30.0)
        bad = ReportEnvelope(env.nonce, env.location_tag,
                             bytes([env.ciphertext[0] ^ 1]) + env.ciphertext[1:],
                             env.integrity_tag)
        assert server.receive_envelope(bad, loc, "v1", 100) is None
        assert len(server.registry) == 0
        assert server.stats.envelopes_rejected == 1
        assert server.snapshot_seq == 0

    def test_duplicate_report_hits_same_id(self, server):
        rng = random.Random(2)
        env1, loc1 = sealed_report("ab", 20.0, 30.0, rng=rng)
        env2, loc2 = sealed_report("ab", 20.4, 28.0, vid="v2", ts=200, rng=rng)
        assert server.receive_envelope(env1, loc1, "v1", 100) == ("1", True)
        assert server.receive_envelope(env2, loc2, "v2", 200) == ("1", False)
        assert len(server.registry) == 1
        assert len(server.registry.events) == 2  # conservation: accepted == events

    def test_wrong_location_claim_dropped(self, server):
        env, _ = sealed_report("ab", 20.0, 30.0)
        assert server.receive_envelope(env, ("ab", 21.0), "v1", 100) is None
        assert server.stats.envelopes_rejected == 1


class TestQuery:
    def test_condition_on_clean_arc(self, server):
        resp = server.query(ConditionRequest("ab"))
        assert isinstance(resp, ConditionResponse)
        assert resp.weight == 0.0 and resp.potholes == ()

    def test_condition_after_ingest(self, server):
        env, loc = sealed_report("ab", 20.0, 30.0)
        server.receive_envelope(env, loc, "v1", 100)
        resp = server.query(ConditionRequest("ab"))
        assert resp.weight == 3000.0 and resp.potholes == ("1",)
        assert resp.snapshot_seq == 1

    def test_route_reflects_ingest(self, server):
        first = server.query(RouteRequest("A", "D"))
        assert isinstance(first, RouteResponse)
        # clean network: both A->D paths weigh 0; ties favor shorter length
        assert first.route.total_weight == 0.0

        rng = random.Random(3)
        for arc, offset, depth in [("ab", 20.0, 50.0), ("ab", 50.0, 60.0),
                                   ("bd", 30.0, 30.0)]:
            env, loc = sealed_report(arc, offset, depth, rng=rng)
            server.receive_envelope(env, loc, "v1", 100)
        second = server.query(RouteRequest("A", "D"))
        oracle = enumerate_min_weight(server.wnet, "A", "D")
        assert close(second.route.total_weight, oracle)
        assert "ab" not in second.route.arcs
        assert second.snapshot_seq == 3

    def test_malformed_request_counted(self, server):
        resp = server.query(ConditionRequest("ghost-arc"))
        assert isinstance(resp, ErrorResponse)
        assert server.stats.queries_failed == 1
        resp = server.query(RouteRequest("A", "ghost"))
        assert isinstance(resp, ErrorResponse)
        assert server.stats.queries_failed == 2

    def test_unreachable_destination(self, diamond_net):
        registry = PotholeRegistry(diamond_net)
        wnet = preprocess(diamond_net, registry)
        server = Server(diamond_net, registry, wnet, KEY)
        resp = server.query(RouteRequest("D", "A"))  # diamond arcs all point away from A
        assert isinstance(resp, ErrorResponse)
