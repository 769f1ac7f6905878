"""
Training a learner and scoring it on instructions
=================================================

Run one training session, watch discovery progress, then evaluate the
frozen learner on single sentences, sentence retries, and logical
expressions of sentences.
"""

from blocktutor.harness import (
    ExperimentConfig,
    eval_expression,
    eval_sequence,
    eval_transition,
    expected_consecutive,
    full_discovery_episode,
    run_training,
    summarize,
)

# The default setting: 200 episodes, a half-and-half mix of self-chosen
# and tutored episodes, learning-progress curriculum.
config = ExperimentConfig(seed=0)
session = run_training(config)

total = len(session.graph.nodes)
print(f"episodes: {len(session.records)}, discovered {len(session.learner.discovered)}/{total}")
print(f"full discovery at episode: {full_discovery_episode(session.records, total)}")
print(f"sentences grounded from tutor narration: {session.grounding.converged_count()}/102")

# Discovery curve, printed every 20 episodes.
print("\nepisode  discovered  mode")
for record in session.records[::20]:
    print(f"{record.episode:7d}  {record.discovered:10d}  {record.mode}")

summary = summarize(session)
print(f"\noverall success rate: {summary['success_rate']:.2f}")
print(f"episodes by mode: {summary['episodes_by_mode']}")

# Evaluation never mutates the trained learner: each probe copies it.
r1 = eval_transition(session.learner, session.competence, attempts=1, seed=config.seed)
r5 = eval_transition(session.learner, session.competence, attempts=5, seed=config.seed)
rexpr = eval_expression(session.learner, session.competence, attempts=1, seed=config.seed)
print(f"\nsingle sentence, 1 attempt:  {r1:.3f}")
print(f"single sentence, 5 attempts: {r5:.3f}")
print(f"expression, 1 attempt:       {rexpr:.3f}")

# Instruction sequences stop at the first failure, so the mean streak
# follows the truncated-geometric closed form for per-step success q.
streak = eval_sequence(session.learner, session.competence, seed=config.seed)
print(f"\nmean consecutive successes (20-step sequences): {streak:.1f}")
print(f"closed form at q={r5:.3f}: {expected_consecutive(r5, seq_len=20):.1f}")
