"""Capture a real service timeline for the console's replay tests.

Drives a live session through episodes, a scene intervention, and an
instruction, then dumps the snapshots and the full event log.  The vitest
suite replays this log and must land on the final snapshot, which keeps the
console free of simulation logic of its own.

Run from the repository root after installing the package with test extras:

    python3 frontend/scripts/capture_fixture.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from blocktutor.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "session_timeline.json"


def snapshot(client: TestClient, session_id: str) -> dict:
    state = client.get(f"/sessions/{session_id}/state")
    graph = client.get(f"/sessions/{session_id}/graph", params={"full": True})
    state.raise_for_status()
    graph.raise_for_status()
    return {"state": state.json(), "graph": graph.json()}


def main() -> None:
    # high competence so the captured instruction round-trip succeeds
    config = {"episodes": 60, "beta": 0.5, "seed": 11, "p0": 0.9, "p_max": 0.95}
    with TestClient(create_app()) as client:
        created = client.post("/sessions", json=config)
        created.raise_for_status()
        session_id = created.json()["id"]

        initial = snapshot(client, session_id)

        first = client.post(
            f"/sessions/{session_id}/episodes", json={"mode": "scheduled", "count": 20}
        )
        first.raise_for_status()

        scene_request = {"intervention": {"kind": "pre_stacked", "k": 2}}
        scene = client.post(f"/sessions/{session_id}/scene", json=scene_request)
        scene.raise_for_status()

        instruction_request = {
            "expression": {"op": "leaf", "text": "get red above green"},
            "attempts": 5,
            "language_mode": "oracle",
        }
        instruction = client.post(
            f"/sessions/{session_id}/instruction", json=instruction_request
        )
        instruction.raise_for_status()

        propose = client.post(f"/sessions/{session_id}/hme/propose")
        propose.raise_for_status()

        second = client.post(
            f"/sessions/{session_id}/episodes", json={"mode": "social", "count": 5}
        )
        second.raise_for_status()

        final = snapshot(client, session_id)

        # the full log, exactly as the WebSocket would deliver it from seq 1
        with client.websocket_connect(f"/sessions/{session_id}/events?since=0") as ws:
            events = [ws.receive_json() for _ in range(len_history(client, session_id))]

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps(
            {
                "config": config,
                "initial": initial,
                "events": events,
                "final": final,
                "scene_set": {"request": scene_request, "response": scene.json()},
                "instruction": {
                    "request": instruction_request,
                    "response": instruction.json(),
                },
                "hme_proposal": propose.json(),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"wrote {OUT} ({len(events)} events)")


def len_history(client: TestClient, session_id: str) -> int:
    return len(client.app.state.registry[session_id].history)


if __name__ == "__main__":
    main()
