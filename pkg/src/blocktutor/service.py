"""Session service: drive live learners over HTTP and stream events over WebSocket.

Each session wraps the same TrainingSession the offline runner uses, so a
scheduled run through this service reproduces the offline artifacts exactly.
Sessions enforce a single writer: concurrent mutations get a 409 instead of
interleaving episodes.  Manual tutor actions (scenes, HME proposals) draw from
their own random streams so they never perturb the training stream.
"""

from __future__ import annotations

import asyncio
import difflib
import random
import threading
import uuid
from contextlib import contextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware

from blocktutor.harness import (
    ConfigError,
    ExperimentConfig,
    TrainingSession,
    derive_seed,
)
from blocktutor.language import (
    ExpressionParseError,
    expression_leaves,
    parse_expression,
)
from blocktutor.semantics import Configuration, Scene, extract_config
from blocktutor.tutor import (
    InfeasibleInterventionError,
    NearGoal,
    PreStacked,
    RandomScatter,
    SceneIntervention,
    propose_hme_goals,
    set_scene,
)

EVENT_POLL_SECONDS = 0.05
EPISODE_MODES = ("autotelic", "social", "scheduled")
LANGUAGE_MODES = ("oracle", "induced")


class SessionHandle:
    """One live session: the simulation, its writer lock, and its event log."""

    def __init__(self, session_id: str, session: TrainingSession):
        self.id = session_id
        self.session = session
        self.lock = threading.Lock()
        self.history: list[dict] = []  # append-only; seq == index + 1
        self.closed = False
        seed = session.config.seed
        self.scene_rng = random.Random(derive_seed(seed, "service-scene"))
        self.hme_rng = random.Random(derive_seed(seed, "service-hme"))
        session.on_event = self.record

    def record(self, event_type: str, payload: dict) -> None:
        self.history.append(
            {"seq": len(self.history) + 1, "type": event_type, "payload": payload}
        )


def _parse_intervention(data: object) -> SceneIntervention:
    if not isinstance(data, dict) or "kind" not in data:
        raise InfeasibleInterventionError("intervention must be an object with a kind")
    kind = data["kind"]
    if kind == "random_scatter":
        return RandomScatter()
    if kind == "pre_stacked":
        k = data.get("k")
        if not isinstance(k, int):
            raise InfeasibleInterventionError("pre_stacked needs an integer k")
        return PreStacked(k)
    if kind == "near_goal":
        goal, distance = data.get("goal"), data.get("distance")
        if not isinstance(goal, str) or not isinstance(distance, int):
            raise InfeasibleInterventionError("near_goal needs a goal bitstring and a distance")
        try:
            target = Configuration.from_string(goal)
        except ValueError as exc:
            raise InfeasibleInterventionError(str(exc))
        return NearGoal(target, distance)
    raise InfeasibleInterventionError(f"unknown intervention kind {kind!r}")


def create_app() -> FastAPI:
    app = FastAPI(title="blocktutor", description="Tutored block-world learner sessions.")
    # the browser console is served from its own origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    registry: dict[str, SessionHandle] = {}
    app.state.registry = registry

    def handle_of(session_id: str) -> SessionHandle:
        handle = registry.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        return handle

    @contextmanager
    def exclusive(handle: SessionHandle):
        # single-writer contract: contenders are told to retry, never queued
        if not handle.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session is busy")
        try:
            yield handle.session
        finally:
            handle.lock.release()

    @app.post("/sessions", status_code=201)
    def create_session(body: dict):
        try:
            config = ExperimentConfig.from_json(body)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        session_id = uuid.uuid4().hex[:12]
        handle = SessionHandle(session_id, TrainingSession(config))
        registry[session_id] = handle
        handle.record("session_created", {"id": session_id, "config": config.to_json()})
        return {"id": session_id, "config": config.to_json()}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            session = handle.session
            return {
                "id": handle.id,
                "config": session.config.to_json(),
                "episodes_run": session.episodes_run,
                "learner": session.learner.to_json(),
                "scene": session.learner.scene.to_json(),
                "sentences_grounded": session.grounding.converged_count(),
                "fully_discovered": session.fully_discovered,
            }

    @app.get("/sessions/{session_id}/graph")
    def get_graph(session_id: str, full: bool = False):
        handle = handle_of(session_id)
        with handle.lock:
            session = handle.session
            discovered = set(session.learner.discovered)
            payload = {
                "nodes": sorted(c.bitstring() for c in discovered),
                "edges": sorted(
                    [u.bitstring(), v.bitstring()]
                    for u, v in session.graph.edges()
                    if u in discovered and v in discovered
                ),
                "frontier": sorted(
                    {f.bitstring() for f, _ in session.graph.frontier_pairs(discovered)}
                ),
                "current": session.learner.current.bitstring(),
            }
            if full:
                payload["full"] = {
                    "nodes": [c.bitstring() for c in session.graph.nodes],
                    "edges": sorted(
                        [u.bitstring(), v.bitstring()] for u, v in session.graph.edges()
                    ),
                }
            return payload

    @app.post("/sessions/{session_id}/episodes")
    def post_episodes(session_id: str, body: dict):
        mode = body.get("mode", "scheduled")
        count = body.get("count", 1)
        if mode not in EPISODE_MODES:
            raise HTTPException(422, f"mode must be one of {EPISODE_MODES}, got {mode!r}")
        if not isinstance(count, int) or isinstance(count, bool) or count < 0:
            raise HTTPException(422, f"count must be a nonnegative integer, got {count!r}")
        handle = handle_of(session_id)
        with exclusive(handle) as session:
            records = []
            reason = None
            for _ in range(count):
                if mode == "social" and not session.graph.frontier_pairs(
                    session.tutor.believed_discovered
                ):
                    reason = "space fully discovered"
                    break
                records.append(session.step(None if mode == "scheduled" else mode).to_json())
            return {
                "requested": count,
                "completed": len(records),
                "records": records,
                "reason": reason,
            }

    @app.post("/sessions/{session_id}/scene")
    def post_scene(session_id: str, body: dict):
        handle = handle_of(session_id)
        with exclusive(handle) as session:
            try:
                if "scene" in body:
                    scene = Scene.from_json(body["scene"])
                elif "intervention" in body:
                    intervention = _parse_intervention(body["intervention"])
                    scene = set_scene(
                        intervention, session.config.n_blocks, handle.scene_rng
                    )
                else:
                    raise HTTPException(422, "body needs a scene or an intervention")
            except (ValueError, KeyError, TypeError) as exc:
                raise HTTPException(422, str(exc) or repr(exc))
            if scene.n_blocks != session.config.n_blocks:
                raise HTTPException(
                    422,
                    f"scene has {scene.n_blocks} blocks, session world has "
                    f"{session.config.n_blocks}",
                )
            session.learner.scene = scene
            payload = {
                "scene": scene.to_json(),
                "configuration": extract_config(scene).bitstring(),
            }
            handle.record("scene_set", payload)
            return payload

    @app.post("/sessions/{session_id}/instruction")
    def post_instruction(session_id: str, body: dict):
        attempts = body.get("attempts", 5)
        language_mode = body.get("language_mode", "oracle")
        if not isinstance(attempts, int) or isinstance(attempts, bool) or attempts < 1:
            raise HTTPException(422, f"attempts must be a positive integer, got {attempts!r}")
        if language_mode not in LANGUAGE_MODES:
            raise HTTPException(
                422, f"language_mode must be one of {LANGUAGE_MODES}, got {language_mode!r}"
            )
        handle = handle_of(session_id)
        with exclusive(handle) as session:
            if "goal" in body:
                try:
                    goal = Configuration.from_string(body["goal"])
                except (ValueError, TypeError) as exc:
                    raise HTTPException(422, str(exc))
                if goal not in session.graph:
                    raise HTTPException(
                        422, f"{body['goal']} is not a valid configuration of this world"
                    )
                success, outcomes, record = session.instruct_goal(goal, attempts)
            elif "expression" in body:
                try:
                    expression = parse_expression(body["expression"])
                except ExpressionParseError as exc:
                    raise HTTPException(400, str(exc))
                unknown = [
                    text for text in expression_leaves(expression)
                    if text not in session.inventory
                ]
                if unknown:
                    hints = {
                        text: difflib.get_close_matches(text, session.inventory.texts(), n=3)
                        for text in unknown
                    }
                    raise HTTPException(
                        422,
                        "unknown sentences: " + "; ".join(
                            f"{text!r} (did you mean {hints[text]})" for text in unknown
                        ),
                    )
                if language_mode == "induced":
                    pending = [
                        text for text in expression_leaves(expression)
                        if not session.grounding.converged(text)
                    ]
                    if pending:
                        raise HTTPException(
                            409, f"not yet grounded: {', '.join(sorted(set(pending)))}"
                        )
                success, outcomes, record = session.instruct(
                    expression, attempts, language_mode
                )
            else:
                raise HTTPException(422, "body needs an expression or a goal")
            reason = None
            if not success:
                reason = "no compatible goal" if not outcomes else "attempts exhausted"
            return {
                "success": success,
                "attempts_used": len(outcomes),
                "outcomes": [outcome.to_json() for outcome in outcomes],
                "record": record.to_json(),
                "reason": reason,
                "scene": session.learner.scene.to_json(),
            }

    @app.post("/sessions/{session_id}/hme/propose")
    def post_hme_propose(session_id: str):
        handle = handle_of(session_id)
        with exclusive(handle) as session:
            pair = propose_hme_goals(session.tutor, handle.hme_rng)
            if pair is None:
                return {"pair": None, "reason": "space fully discovered"}
            return {"pair": pair.to_json(), "reason": None}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        handle = registry.pop(session_id, None)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")
        handle.closed = True
        return Response(status_code=204)

    @app.websocket("/sessions/{session_id}/events")
    async def events(websocket: WebSocket, session_id: str):
        handle = registry.get(session_id)
        if handle is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        try:
            cursor = int(websocket.query_params.get("since", 0))
        except ValueError:
            cursor = 0
        try:
            while True:
                # the history is append-only, so a cursor never misses or repeats
                while cursor < len(handle.history):
                    await websocket.send_json(handle.history[cursor])
                    cursor += 1
                if handle.closed:
                    await websocket.close()
                    return
                await asyncio.sleep(EVENT_POLL_SECONDS)
        except (WebSocketDisconnect, RuntimeError):
            return

    return app


app = create_app()
