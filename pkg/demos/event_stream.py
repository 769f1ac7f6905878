"""
Watching a session through its event stream
===========================================

Every observable step of a session is emitted as a typed event.  The
serving layer relays this stream over a WebSocket; here we attach a
plain callback and narrate a few episodes.  Attaching a sink never
changes the run itself.
"""

from blocktutor.harness import ExperimentConfig, TrainingSession, metrics_lines, run_training

config = ExperimentConfig(episodes=6, beta=0.5, seed=2)
session = TrainingSession(config)

events = []
session.on_event = lambda kind, payload: events.append((kind, payload))

for _ in range(config.episodes):
    session.step()

for kind, payload in events:
    if kind == "episode_started":
        print(f"\nepisode {payload['episode']} ({payload['mode']})")
    elif kind == "move_executed":
        print(f"  move {payload['from']} -> {payload['to']}")
    elif kind == "goal_discovered":
        print(f"  + discovered {payload['goal']}")
    elif kind == "pair_internalized":
        print(f"  * internalized frontier {payload['frontier']} and beyond {payload['beyond']}")
    elif kind == "episode_finished":
        print(f"  done: goal {payload['goal'] or '(none)'}, success={payload['success']}")

counts = {kind: sum(1 for k, _ in events if k == kind) for kind, _ in events}
print(f"\nevent counts: {counts}")

# The stream is a pure tap: the same config without a sink produces
# byte-identical metrics.
silent = run_training(config)
assert metrics_lines(silent.records) == metrics_lines(session.records)
print("identical metrics with and without the sink: True")
