"""Tests for the session service: REST surface, busy contract, event stream."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from blocktutor.goal_graph import build_goal_graph
from blocktutor.harness import ExperimentConfig, metrics_lines, run_training
from blocktutor.language import build_inventory, oracle_ground
from blocktutor.semantics import Configuration, Predicate, Scene, extract_config
from blocktutor.service import create_app

EVENT_TYPES = {
    "session_created", "scene_set", "episode_started", "move_executed",
    "goal_discovered", "pair_internalized", "episode_finished", "metric_update",
}

GRAPH = build_goal_graph(3)


@pytest.fixture()
def client():
    with TestClient(create_app()) as client:
        yield client


def create_session(client, **config) -> str:
    response = client.post("/sessions", json=config)
    assert response.status_code == 201
    return response.json()["id"]


def handle_of(client, session_id):
    return client.app.state.registry[session_id]


def easy_session(client, episodes: int = 40) -> str:
    # high competence so the learner discovers plenty to be instructed about
    session_id = create_session(client, p0=0.95, p_max=0.95, seed=5)
    response = client.post(
        f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": episodes}
    )
    assert response.status_code == 200
    return session_id


# --- session lifecycle -----------------------------------------------------------------


def test_create_returns_distinct_ids(client):
    first = create_session(client, episodes=10)
    second = create_session(client, episodes=10)
    assert first != second


def test_create_rejects_invalid_config_with_field_names(client):
    response = client.post("/sessions", json={"episodes": 0, "epsilon": 7})
    assert response.status_code == 400
    assert "episodes" in response.json()["detail"]
    assert "epsilon" in response.json()["detail"]


def test_create_rejects_unknown_fields(client):
    response = client.post("/sessions", json={"episodess": 10})
    assert response.status_code == 400
    assert "episodess" in response.json()["detail"]


def test_unknown_session_is_404(client):
    assert client.get("/sessions/nope/state").status_code == 404
    assert client.post("/sessions/nope/episodes", json={"count": 1}).status_code == 404
    assert client.delete("/sessions/nope").status_code == 404


def test_delete_removes_the_session(client):
    session_id = create_session(client)
    assert client.delete(f"/sessions/{session_id}").status_code == 204
    assert client.get(f"/sessions/{session_id}/state").status_code == 404
    assert client.delete(f"/sessions/{session_id}").status_code == 404


# --- state and graph -----------------------------------------------------------------


def test_fresh_state_shows_only_the_initial_configuration(client):
    session_id = create_session(client, seed=3)
    state = client.get(f"/sessions/{session_id}/state").json()
    assert state["learner"]["discovered"] == ["000000000"]
    assert state["episodes_run"] == 0
    assert state["sentences_grounded"] == 0
    assert not state["fully_discovered"]
    assert Scene.from_json(state["scene"]) == Scene.scattered(3)


def test_graph_endpoint_grows_with_discovery(client):
    session_id = create_session(client, seed=3)
    graph = client.get(f"/sessions/{session_id}/graph").json()
    assert graph["nodes"] == ["000000000"]
    assert graph["edges"] == []
    assert graph["frontier"] == ["000000000"]
    assert graph["current"] == "000000000"

    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 30})
    grown = client.get(f"/sessions/{session_id}/graph").json()
    assert len(grown["nodes"]) > 1
    assert all(u in grown["nodes"] and v in grown["nodes"] for u, v in grown["edges"])


def test_graph_full_overlay(client):
    session_id = create_session(client)
    payload = client.get(f"/sessions/{session_id}/graph", params={"full": 1}).json()
    assert len(payload["full"]["nodes"]) == 26
    assert len(payload["full"]["edges"]) == sum(1 for _ in GRAPH.edges())
    assert "full" not in client.get(f"/sessions/{session_id}/graph").json()


# --- episodes -----------------------------------------------------------------


def test_count_zero_is_a_noop(client):
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/episodes", json={"count": 0})
    assert response.status_code == 200
    assert response.json() == {"requested": 0, "completed": 0, "records": [], "reason": None}


def test_scheduled_episodes_advance_the_session(client):
    session_id = create_session(client, seed=1)
    response = client.post(
        f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 10}
    )
    body = response.json()
    assert body["completed"] == 10
    assert [r["episode"] for r in body["records"]] == list(range(1, 11))
    assert client.get(f"/sessions/{session_id}/state").json()["episodes_run"] == 10


def test_scheduled_with_beta_one_is_all_social(client):
    session_id = create_session(client, beta=1.0, seed=2)
    body = client.post(
        f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 8}
    ).json()
    assert all(r["mode"] == "social" for r in body["records"])


def test_forced_modes_are_respected(client):
    session_id = create_session(client, beta=1.0, seed=2)
    body = client.post(
        f"/sessions/{session_id}/episodes", json={"mode": "autotelic", "count": 5}
    ).json()
    assert all(r["mode"] == "autotelic" for r in body["records"])


def test_social_reports_fully_discovered_space(client):
    session_id = create_session(client, beta=1.0)
    handle = handle_of(client, session_id)
    handle.session.learner.discovered = set(GRAPH.nodes)
    handle.session.tutor.believed_discovered = set(GRAPH.nodes)
    body = client.post(
        f"/sessions/{session_id}/episodes", json={"mode": "social", "count": 5}
    ).json()
    assert body["completed"] == 0
    assert body["records"] == []
    assert body["reason"] == "space fully discovered"


@pytest.mark.parametrize(
    "payload",
    [{"mode": "weird", "count": 1}, {"count": -1}, {"count": "three"}, {"count": True}],
)
def test_bad_episode_payloads_are_422(client, payload):
    session_id = create_session(client)
    assert client.post(f"/sessions/{session_id}/episodes", json=payload).status_code == 422


# --- the busy contract -----------------------------------------------------------------


def test_busy_sessions_get_409_not_interleaving(client):
    session_id = create_session(client)
    handle = handle_of(client, session_id)
    assert handle.lock.acquire(blocking=False)
    try:
        paths = [
            (f"/sessions/{session_id}/episodes", {"count": 1}),
            (f"/sessions/{session_id}/scene", {"intervention": {"kind": "random_scatter"}}),
            (f"/sessions/{session_id}/instruction", {"goal": "000000000"}),
            (f"/sessions/{session_id}/hme/propose", None),
        ]
        for path, body in paths:
            response = client.post(path, json=body)
            assert response.status_code == 409, path
            assert "busy" in response.json()["detail"]
    finally:
        handle.lock.release()


# --- scenes -----------------------------------------------------------------


def test_scene_intervention_pre_stacked(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/scene",
        json={"intervention": {"kind": "pre_stacked", "k": 2}},
    )
    assert response.status_code == 200
    bits = response.json()["configuration"]
    assert "1" in bits[3:]  # some above predicate holds
    state = client.get(f"/sessions/{session_id}/state").json()
    assert state["learner"]["current"] == bits


def test_scene_accepts_explicit_scene_json(client):
    session_id = create_session(client)
    scene = Scene.scattered(3).to_json()
    response = client.post(f"/sessions/{session_id}/scene", json={"scene": scene})
    assert response.status_code == 200
    assert response.json()["configuration"] == "000000000"


def test_scene_rejects_duplicate_blocks(client):
    session_id = create_session(client)
    scene = {
        "structures": [
            {"kind": "stack", "blocks": ["red", "green"]},
            {"kind": "single", "block": "red"},
        ],
        "clusters": [[0], [1]],
    }
    response = client.post(f"/sessions/{session_id}/scene", json={"scene": scene})
    assert response.status_code == 422
    assert "more than one structure" in response.json()["detail"]


def test_scene_rejects_wrong_world_size(client):
    session_id = create_session(client)  # n_blocks = 3
    response = client.post(
        f"/sessions/{session_id}/scene", json={"scene": Scene.scattered(2).to_json()}
    )
    assert response.status_code == 422
    assert "blocks" in response.json()["detail"]


def test_scene_rejects_unknown_interventions(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/scene", json={"intervention": {"kind": "tornado"}}
    )
    assert response.status_code == 422


def test_scene_rejects_infeasible_near_goal(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/scene",
        json={"intervention": {"kind": "near_goal", "goal": "110000000", "distance": 1}},
    )
    assert response.status_code == 422
    assert "not a valid configuration" in response.json()["detail"]


def test_scene_requires_a_body_variant(client):
    session_id = create_session(client)
    assert client.post(f"/sessions/{session_id}/scene", json={}).status_code == 422


# --- instructions -----------------------------------------------------------------


def test_instruct_known_sentence_succeeds_on_a_trained_session(client):
    session_id = easy_session(client)
    handle = handle_of(client, session_id)
    learner = handle.session.learner
    text = next(
        s.text for s in build_inventory(3)
        if oracle_ground(s, learner.current, learner.discovered)
    )
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "leaf", "text": text}, "attempts": 5},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["record"]["mode"] == "instructed"
    assert body["reason"] is None
    assert 1 <= body["attempts_used"] <= 5


def test_instruct_streams_scene_round_trip(client):
    # the console's core loop: set a scene, ask for above(red,green), see it hold
    session_id = easy_session(client)
    client.post(
        f"/sessions/{session_id}/scene", json={"intervention": {"kind": "random_scatter"}}
    )
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "leaf", "text": "get red above green"}, "attempts": 5},
    )
    body = response.json()
    assert body["success"] is True
    assert extract_config(Scene.from_json(body["scene"])).above(0, 1)


def test_instruct_unknown_sentence_lists_suggestions(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "leaf", "text": "get red abuve green"}},
    )
    assert response.status_code == 422
    detail = response.json()["detail"]
    assert "get red abuve green" in detail
    assert "get red above green" in detail  # nearest inventory entry offered


def test_instruct_malformed_expression_is_400(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "xor", "children": []}},
    )
    assert response.status_code == 400


def test_instruct_induced_mode_before_grounding_is_409(client):
    session_id = create_session(client)
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={
            "expression": {"op": "leaf", "text": "get red above green"},
            "language_mode": "induced",
        },
    )
    assert response.status_code == 409
    assert "not yet grounded" in response.json()["detail"]


def test_instruct_induced_mode_after_grounding_works(client):
    session_id = create_session(client, beta=0.8, p0=0.9, p_max=0.9, episodes=400, seed=9)
    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 120})
    handle = handle_of(client, session_id)
    grounding = handle.session.grounding
    text = next(t for t in build_inventory(3).texts() if grounding.converged(t))
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "leaf", "text": text}, "language_mode": "induced"},
    )
    assert response.status_code == 200


def test_instruct_not_over_empty_complement_reports_no_goal(client):
    session_id = create_session(client)
    client.post(
        f"/sessions/{session_id}/scene", json={"intervention": {"kind": "pre_stacked", "k": 2}}
    )
    # discovered is still just the scattered start; a sentence matching it makes
    # the complement within discovered empty
    text = next(
        s.text for s in build_inventory(3)
        if s.predicate == Predicate("close", 0, 1) and s.target == 0
    )
    response = client.post(
        f"/sessions/{session_id}/instruction",
        json={"expression": {"op": "not", "children": [{"op": "leaf", "text": text}]}},
    )
    body = response.json()
    assert response.status_code == 200
    assert body["success"] is False
    assert body["reason"] == "no compatible goal"
    assert body["attempts_used"] == 0


def test_instruct_direct_goal(client):
    session_id = easy_session(client)
    handle = handle_of(client, session_id)
    goal = GRAPH.neighbors(handle.session.learner.current)[0]
    response = client.post(
        f"/sessions/{session_id}/instruction", json={"goal": goal.bitstring(), "attempts": 5}
    )
    body = response.json()
    assert response.status_code == 200
    assert body["success"] is True
    assert body["record"]["goal"] == goal.bitstring()


@pytest.mark.parametrize(
    "payload, status",
    [
        ({"goal": "abc"}, 422),
        ({"goal": "110000000"}, 422),  # unrealizable configuration
        ({}, 422),
        ({"expression": {"op": "leaf", "text": "get red above green"}, "attempts": 0}, 422),
        ({"goal": "000000000", "language_mode": "telepathy"}, 422),
    ],
)
def test_bad_instruction_payloads(client, payload, status):
    session_id = create_session(client)
    response = client.post(f"/sessions/{session_id}/instruction", json=payload)
    assert response.status_code == status


# --- HME proposals -----------------------------------------------------------------


def test_hme_propose_returns_a_frontier_pair(client):
    session_id = create_session(client, seed=4)
    body = client.post(f"/sessions/{session_id}/hme/propose").json()
    assert body["pair"]["frontier"] == "000000000"  # only discovered node
    beyond = Configuration.from_string(body["pair"]["beyond"])
    assert beyond in GRAPH.neighbors(Configuration.from_string("000000000"))


def test_hme_propose_on_full_discovery(client):
    session_id = create_session(client)
    handle = handle_of(client, session_id)
    handle.session.tutor.believed_discovered = set(GRAPH.nodes)
    body = client.post(f"/sessions/{session_id}/hme/propose").json()
    assert body == {"pair": None, "reason": "space fully discovered"}


# --- offline equivalence -----------------------------------------------------------------


def test_service_run_equals_offline_run(client):
    config = ExperimentConfig(episodes=100, seed=42)
    session_id = create_session(client, **config.to_json())
    # interleave read-only calls: they must not perturb the training stream
    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 50})
    client.get(f"/sessions/{session_id}/state")
    client.get(f"/sessions/{session_id}/graph", params={"full": 1})
    client.post(f"/sessions/{session_id}/hme/propose")
    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 50})

    offline = run_training(config)
    handle = handle_of(client, session_id)
    assert handle.session.learner.to_json() == offline.learner.to_json()
    assert metrics_lines(handle.session.records) == metrics_lines(offline.records)


# --- the event stream -----------------------------------------------------------------


def test_events_replay_gapless_and_live(client):
    session_id = create_session(client, seed=6)
    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 3})
    handle = handle_of(client, session_id)
    recorded = len(handle.history)
    assert recorded >= 7  # created + 3 x (started, finished)

    with client.websocket_connect(f"/sessions/{session_id}/events") as ws:
        events = [ws.receive_json() for _ in range(recorded)]
        assert [e["seq"] for e in events] == list(range(1, recorded + 1))
        assert events[0]["type"] == "session_created"
        assert {e["type"] for e in events} <= EVENT_TYPES

        # live phase: new episodes stream over the same socket
        client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 2})
        live_total = len(handle.history)
        live = [ws.receive_json() for _ in range(live_total - recorded)]
        assert [e["seq"] for e in live] == list(range(recorded + 1, live_total + 1))
        assert sum(e["type"] == "episode_finished" for e in live) == 2

    finished = [e for e in events if e["type"] == "episode_finished"]
    assert [f["payload"]["episode"] for f in finished] == [1, 2, 3]


def test_events_resume_from_a_cursor(client):
    session_id = create_session(client, seed=6)
    client.post(f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 2})
    with client.websocket_connect(f"/sessions/{session_id}/events?since=2") as ws:
        assert ws.receive_json()["seq"] == 3


def test_events_for_unknown_session_close_immediately(client):
    with pytest.raises(WebSocketDisconnect):
        with client.websocket_connect("/sessions/nope/events"):
            pass


def test_events_socket_closes_after_delete(client):
    session_id = create_session(client, seed=6)
    with client.websocket_connect(f"/sessions/{session_id}/events") as ws:
        assert ws.receive_json()["type"] == "session_created"
        client.delete(f"/sessions/{session_id}")
        with pytest.raises(WebSocketDisconnect):
            for _ in range(10):  # drain anything buffered, then hit the close
                ws.receive_json()
