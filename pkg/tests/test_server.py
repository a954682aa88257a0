import numpy as np
import pytest
from fastapi.testclient import TestClient

from vibropref.server import create_app
from vibropref.signal import SignalParams, motor_strengths, render_pulse_train


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(client, budget=3, seed=101, **extra):
    body = {"budget": budget, "seed": seed, **extra}
    r = client.post("/sessions", json=body)
    assert r.status_code == 200
    return r.json()["session_id"]


def drive_to_validation(client, sid):
    while True:
        r = client.post(f"/sessions/{sid}/response", json={"choice": "A", "confidence": 4})
        assert r.status_code == 200
        if r.json()["phase"] != "learning":
            return


def drive_to_adjustment(client, sid):
    drive_to_validation(client, sid)
    while True:
        v = client.get(f"/sessions/{sid}/validation").json()
        r = client.post(
            f"/sessions/{sid}/validation/response",
            json={"pair_tag": v["tag"], "chosen_side": "A"},
        )
        assert r.status_code == 200
        if r.json()["phase"] != "validation":
            return


class TestSessionLifecycle:
    def test_create_returns_id_and_seed(self, client):
        r = client.post("/sessions", json={"seed": 7, "budget": 2})
        body = r.json()
        assert r.status_code == 200
        assert body["seed"] == 7 and body["budget"] == 2
        assert body["session_id"].startswith("vp-")

    def test_duplicate_seed_conflicts(self, client):
        make_session(client, seed=8)
        r = client.post("/sessions", json={"seed": 8})
        assert r.status_code == 409

    def test_query_returns_params_and_timelines(self, client):
        sid = make_session(client)
        q = client.get(f"/sessions/{sid}/query").json()
        assert q["round"] == 1 and q["budget"] == 3
        for side in ("A", "B"):
            option = q["pair"][side]
            params = SignalParams(**option["params"])
            timeline = option["timeline"]
            assert timeline["total_ms"] == 3000.0
            expected = render_pulse_train(params).to_json_dict()
            assert timeline == expected
            left, right = motor_strengths(params)
            assert timeline["pulses"][0]["left"] == pytest.approx(left)
            assert timeline["pulses"][0]["right"] == pytest.approx(right)

    def test_full_protocol_over_http(self, client):
        sid = make_session(client, budget=2)
        drive_to_adjustment(client, sid)
        rec = client.get(f"/sessions/{sid}/recommendation").json()
        for _ in range(3):
            r = client.post(f"/sessions/{sid}/favorites", json={"params": rec["params"]})
            assert r.status_code == 200
        log = client.get(f"/sessions/{sid}/log").json()
        assert log["phase"] == "complete"
        assert len(log["favorites"]) == 3
        assert log["favorites"][0]["posterior_percentile"] == 100.0

    def test_unknown_session_is_404(self, client):
        assert client.get("/sessions/vp-nope/query").status_code == 404
        assert client.get("/sessions/vp-nope/log").status_code == 404


class TestResponseEndpoint:
    def test_choice_maps_through_presentation_swap(self, client):
        sid = make_session(client, budget=2, seed=202)
        log0 = client.get(f"/sessions/{sid}/log").json()
        swapped = log0["pending_query"]["swapped"]
        client.post(f"/sessions/{sid}/response", json={"choice": "A", "confidence": 3})
        entry = client.get(f"/sessions/{sid}/log").json()["rounds"][0]
        assert entry["presented_choice"] == "A"
        assert entry["choice"] == (-1 if swapped else +1)

    def test_round_guard_over_http(self, client):
        sid = make_session(client, budget=3)
        r1 = client.post(
            f"/sessions/{sid}/response", json={"choice": "A", "confidence": 4, "round": 1}
        )
        assert r1.status_code == 200
        r2 = client.post(
            f"/sessions/{sid}/response", json={"choice": "A", "confidence": 4, "round": 1}
        )
        assert r2.status_code == 409

    def test_validation_inputs(self, client):
        sid = make_session(client)
        assert (
            client.post(f"/sessions/{sid}/response", json={"choice": "C", "confidence": 4}).status_code
            == 422
        )
        assert (
            client.post(f"/sessions/{sid}/response", json={"choice": "A", "confidence": 0}).status_code
            == 422
        )

    def test_fallback_rounds_annotated(self, client):
        sid = make_session(client, budget=2)
        client.post(
            f"/sessions/{sid}/response",
            json={"choice": "B", "confidence": 2, "fallback": True},
        )
        client.post(f"/sessions/{sid}/response", json={"choice": "A", "confidence": 4})
        log = client.get(f"/sessions/{sid}/log").json()
        assert log["annotations"]["fallback_rounds"] == [1]


class TestValidationEndpoints:
    def test_pairs_served_in_protocol_order(self, client):
        sid = make_session(client, budget=2)
        drive_to_validation(client, sid)
        tags = []
        for _ in range(4):
            v = client.get(f"/sessions/{sid}/validation").json()
            tags.append(v["tag"])
            client.post(
                f"/sessions/{sid}/validation/response",
                json={"pair_tag": v["tag"], "chosen_side": "B"},
            )
        assert tags == ["anchor_easy", "anchor_medium", "global_tradeoff", "consistency_check"]
        assert client.get(f"/sessions/{sid}/validation").status_code == 409

    def test_out_of_order_rejected(self, client):
        sid = make_session(client, budget=2)
        drive_to_validation(client, sid)
        r = client.post(
            f"/sessions/{sid}/validation/response",
            json={"pair_tag": "consistency_check", "chosen_side": "A"},
        )
        assert r.status_code == 409

    def test_validation_before_learning_done_rejected(self, client):
        sid = make_session(client)
        assert client.get(f"/sessions/{sid}/validation").status_code == 409


class TestRecommendationAndPreview:
    def test_recommendation_not_ready_during_learning(self, client):
        sid = make_session(client)
        assert client.get(f"/sessions/{sid}/recommendation").status_code == 409

    def test_recommendation_payload(self, client):
        sid = make_session(client, budget=2)
        drive_to_validation(client, sid)
        rec = client.get(f"/sessions/{sid}/recommendation").json()
        params = SignalParams(**rec["params"])
        assert rec["timeline"] == render_pulse_train(params).to_json_dict()
        assert isinstance(rec["posterior_mean"], float)

    def test_preview_compiles_timeline(self, client):
        sid = make_session(client)
        body = {"params": {"intensity": 0.5, "balance": 0.5, "rhythm": 2.0, "grain": 0.35}}
        r = client.post(f"/sessions/{sid}/preview", json=body)
        assert r.status_code == 200
        timeline = r.json()["timeline"]
        expected = render_pulse_train(SignalParams(**body["params"])).to_json_dict()
        assert timeline == expected

    def test_preview_rejects_out_of_range(self, client):
        sid = make_session(client)
        body = {"params": {"intensity": 1.5, "balance": 0.5, "rhythm": 2.0, "grain": 0.35}}
        assert client.post(f"/sessions/{sid}/preview", json=body).status_code == 422


class TestFavoritesEndpoint:
    def test_favorites_gated_by_phase(self, client):
        sid = make_session(client, budget=2)
        body = {"params": {"intensity": 0.5, "balance": 0.5, "rhythm": 2.0, "grain": 0.35}}
        assert client.post(f"/sessions/{sid}/favorites", json=body).status_code == 409

    def test_fourth_favorite_rejected(self, client):
        sid = make_session(client, budget=2)
        drive_to_adjustment(client, sid)
        body = {"params": {"intensity": 0.5, "balance": 0.5, "rhythm": 2.0, "grain": 0.35}}
        for expect in (1, 2, 3):
            r = client.post(f"/sessions/{sid}/favorites", json=body)
            assert r.json()["count"] == expect
        assert client.post(f"/sessions/{sid}/favorites", json=body).status_code == 409
