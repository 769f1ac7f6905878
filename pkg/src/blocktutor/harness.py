"""Experiment harness: training runs, the three evaluation setups, sweeps, metrics.

One seeded `TrainingSession` drives everything: the offline runner steps it to
completion and writes artifact files, the HTTP service steps the same object
interactively.  Evaluations are pure functions of (agent snapshot, seed) so
that repeated calls agree bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import random
import statistics
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from scipy.stats import binomtest

from blocktutor.goal_graph import UnknownGoalError, build_goal_graph
from blocktutor.language import (
    Expression,
    GroundingTable,
    Leaf,
    build_inventory,
    follow_instruction,
    induce,
    sample_expression,
)
from blocktutor.learner import (
    CompetenceModel,
    EpisodeOutcome,
    LearnerState,
    rehearse,
    run_episode,
    sample_goal,
)
from blocktutor.semantics import Configuration, check_world_size
from blocktutor.tutor import (
    AUTOTELIC,
    SOCIAL,
    PreStacked,
    RandomScatter,
    SceneIntervention,
    TutorModel,
    describe,
    observe,
    run_social_episode,
    schedule,
    set_scene,
)

log = logging.getLogger(__name__)

REHEARSAL_CADENCE = 5  # one rehearsal per this many autotelic episodes

CURRICULA = ("uniform", "learning_progress", "random_config")
SCENE_STRATEGIES = ("random_scatter", "pre_stacked_2", "pre_stacked_3")
MODES = (AUTOTELIC, SOCIAL, "instructed")

# Competence parameters frozen by the calibration pilot (calibrate_competence):
# a default-config trained agent lands near 0.89 single-attempt instruction
# success.  These stand in for deep RL skill acquisition, nothing more.
CALIBRATED_P0 = 0.2
CALIBRATED_P_MAX = 0.35
CALIBRATED_TAU = 8.0


class ConfigError(ValueError):
    """An ExperimentConfig field is out of range or unknown."""


@dataclass(frozen=True)
class ExperimentConfig:
    n_blocks: int = 3
    episodes: int = 200
    max_moves: int = 8
    p0: float = CALIBRATED_P0
    p_max: float = CALIBRATED_P_MAX
    tau: float = CALIBRATED_TAU
    epsilon: float = 0.2
    curriculum: str = "learning_progress"
    beta: float = 0.2
    scene_strategy: str = "random_scatter"
    seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        problems = []
        try:
            check_world_size(self.n_blocks)
        except Exception as exc:
            problems.append(f"n_blocks: {exc}")
        if self.episodes < 1:
            problems.append(f"episodes: must be >= 1, got {self.episodes}")
        if self.max_moves < 1:
            problems.append(f"max_moves: must be >= 1, got {self.max_moves}")
        try:
            self.competence  # noqa: B018 - validation happens in the constructor
        except ValueError as exc:
            problems.append(f"competence: {exc}")
        for name in ("epsilon", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name}: must be in [0, 1], got {value}")
        if self.curriculum not in CURRICULA:
            problems.append(f"curriculum: must be one of {CURRICULA}, got {self.curriculum!r}")
        if self.scene_strategy not in SCENE_STRATEGIES:
            problems.append(
                f"scene_strategy: must be one of {SCENE_STRATEGIES}, got {self.scene_strategy!r}"
            )
        elif self.scene_strategy == "pre_stacked_3" and self.n_blocks < 3:
            problems.append("scene_strategy: pre_stacked_3 needs at least 3 blocks")
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def competence(self) -> CompetenceModel:
        return CompetenceModel(p0=self.p0, p_max=self.p_max, tau=self.tau)

    @property
    def intervention(self) -> SceneIntervention:
        if self.scene_strategy == "pre_stacked_2":
            return PreStacked(2)
        if self.scene_strategy == "pre_stacked_3":
            return PreStacked(3)
        return RandomScatter()

    def to_json(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class MetricsRecord:
    """One line of metrics.jsonl: what a single episode did.

    Deliberately free of wall-clock times so identical runs serialize to
    identical bytes; timings live in summary.json.
    """

    episode: int
    mode: str
    goal: str  # pursued goal bitstring, "" for a social no-op
    success: bool
    moves: int
    discovered: int
    newly: int

    def to_json(self) -> dict:
        return {
            "episode": self.episode,
            "mode": self.mode,
            "goal": self.goal,
            "success": self.success,
            "moves": self.moves,
            "discovered": self.discovered,
            "newly": self.newly,
        }

    @classmethod
    def from_json(cls, data: dict) -> "MetricsRecord":
        return cls(**{f.name: data[f.name] for f in fields(cls)})


def derive_seed(*parts) -> int:
    """Stable sub-seed from labels, so evaluation streams never collide."""
    text = ":".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


class TrainingSession:
    """One seeded run, stepped one episode at a time.

    The offline runner and the live service both drive this class, which is
    what makes "a scheduled service session equals the offline run" a
    structural fact rather than a test hope.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.graph = build_goal_graph(config.n_blocks)
        self.competence = config.competence
        self.inventory = build_inventory(config.n_blocks)
        self.learner = LearnerState(
            n_blocks=config.n_blocks, seed=config.seed, epsilon=config.epsilon
        )
        self.tutor = TutorModel.for_learner(self.learner, config.beta)
        self.grounding = GroundingTable()
        self.rng = random.Random(derive_seed(config.seed, "training"))
        self.records: list[MetricsRecord] = []
        self._autotelic_episodes = 0
        # optional sink for live consumers; never touches the random streams
        self.on_event: Optional[Callable[[str, dict], None]] = None

    def _emit(self, event_type: str, payload: dict) -> None:
        if self.on_event is not None:
            self.on_event(event_type, payload)

    def _emit_outcome(self, outcome: EpisodeOutcome) -> None:
        for before, after in zip(outcome.trajectory, outcome.trajectory[1:]):
            self._emit(
                "move_executed",
                {"from": before.bitstring(), "to": after.bitstring()},
            )

    def _emit_discoveries(self, before: set) -> None:
        # internalized pairs count too, so report from the discovered-set delta
        for config in sorted(self.learner.discovered - before):
            self._emit("goal_discovered", {"goal": config.bitstring()})

    def _append(self, record: MetricsRecord) -> MetricsRecord:
        self.records.append(record)
        self._emit("episode_finished", record.to_json())
        self._emit("metric_update", {"episode": record.episode, "discovered": record.discovered})
        return record

    @property
    def episodes_run(self) -> int:
        return len(self.records)

    @property
    def fully_discovered(self) -> bool:
        return len(self.learner.discovered) == len(self.graph.nodes)

    def step(self, mode: Optional[str] = None) -> MetricsRecord:
        """Run one episode; the tutor's schedule picks the mode when not forced."""
        config = self.config
        self.learner.scene = set_scene(config.intervention, config.n_blocks, self.rng)
        if mode is None:
            mode = schedule(self.tutor, self.rng)
        self._emit("episode_started", {"episode": len(self.records) + 1, "mode": mode})
        before = set(self.learner.discovered)
        if mode == SOCIAL:
            goal_bits, success, moves = self._social_episode()
        elif mode == AUTOTELIC:
            goal_bits, success, moves = self._autotelic_episode()
        else:
            raise ValueError(f"unknown episode mode {mode!r}")
        self._emit_discoveries(before)
        return self._append(MetricsRecord(
            episode=len(self.records) + 1,
            mode=mode,
            goal=goal_bits,
            success=success,
            moves=moves,
            discovered=len(self.learner.discovered),
            newly=len(self.learner.discovered) - len(before),
        ))

    def _social_episode(self) -> tuple[str, bool, int]:
        result = run_social_episode(
            self.tutor, self.learner, self.competence, self.rng, self.config.max_moves
        )
        for outcome in result.outcomes:
            self._narrate(outcome)
            self._emit_outcome(outcome)
        if result.pair is None:
            return "", True, 0
        if result.internalized:
            self._emit(
                "pair_internalized",
                {
                    "frontier": result.pair.frontier.bitstring(),
                    "beyond": result.pair.beyond.bitstring(),
                },
            )
        moves = sum(outcome.moves_used for outcome in result.outcomes)
        return result.pair.beyond.bitstring(), result.beyond_success, moves

    def _autotelic_episode(self) -> tuple[str, bool, int]:
        goal = sample_goal(self.learner, self.config.curriculum, self.rng)
        outcome = run_episode(
            self.learner,
            self.learner.scene,
            goal,
            self.competence,
            self.config.max_moves,
            self.rng,
        )
        observe(self.tutor, outcome)
        self._emit_outcome(outcome)
        self._autotelic_episodes += 1
        if self._autotelic_episodes % REHEARSAL_CADENCE == 0:
            rehearsal = rehearse(self.learner, self.competence, self.rng)
            if rehearsal is not None:
                observe(self.tutor, rehearsal)
                self._emit_outcome(rehearsal)
        return goal.bitstring(), outcome.success, outcome.moves_used

    def _narrate(self, outcome: EpisodeOutcome) -> None:
        # the tutor comments on each scene change; the learner induces meanings
        for before, after in zip(outcome.trajectory, outcome.trajectory[1:]):
            sentence = describe(before, after, self.inventory, self.rng)
            if sentence is not None:
                induce(self.grounding, (before, sentence, after))

    def instruct(
        self,
        expression: Expression,
        attempts: int = 5,
        language_mode: str = "oracle",
    ) -> tuple[bool, tuple[EpisodeOutcome, ...], MetricsRecord]:
        """Follow one instruction against the current scene; records an episode."""
        source = self.inventory if language_mode == "oracle" else self.grounding
        before = set(self.learner.discovered)
        success, outcomes = follow_instruction(
            expression,
            self.learner,
            self.competence,
            self.rng,
            attempts=attempts,
            max_moves=self.config.max_moves,
            source=source,
        )
        for outcome in outcomes:
            observe(self.tutor, outcome)
            self._emit_outcome(outcome)
        record = self._record_instructed(
            outcomes[-1].goal.bitstring() if outcomes else "", success, outcomes, before
        )
        return success, outcomes, record

    def instruct_goal(
        self,
        goal: Configuration,
        attempts: int = 5,
    ) -> tuple[bool, tuple[EpisodeOutcome, ...], MetricsRecord]:
        """Pursue an explicit goal configuration with a try-again budget."""
        if attempts < 1:
            raise ValueError(f"attempts must be >= 1, got {attempts}")
        if goal not in self.graph:
            raise UnknownGoalError(f"{goal} is not a valid configuration of this world")
        before = set(self.learner.discovered)
        outcomes: list[EpisodeOutcome] = []
        success = False
        for _ in range(attempts):
            outcome = run_episode(
                self.learner,
                self.learner.scene,
                goal,
                self.competence,
                self.config.max_moves,
                self.rng,
            )
            observe(self.tutor, outcome)
            self._emit_outcome(outcome)
            outcomes.append(outcome)
            if outcome.success:
                success = True
                break
        record = self._record_instructed(goal.bitstring(), success, tuple(outcomes), before)
        return success, tuple(outcomes), record

    def _record_instructed(
        self,
        goal_bits: str,
        success: bool,
        outcomes: Sequence[EpisodeOutcome],
        before: set,
    ) -> MetricsRecord:
        self._emit_discoveries(before)
        return self._append(MetricsRecord(
            episode=len(self.records) + 1,
            mode="instructed",
            goal=goal_bits,
            success=success,
            moves=sum(outcome.moves_used for outcome in outcomes),
            discovered=len(self.learner.discovered),
            newly=len(self.learner.discovered) - len(before),
        ))

    def snapshot(self) -> dict:
        return {
            "config": self.config.to_json(),
            "learner": self.learner.to_json(),
            "episodes_run": self.episodes_run,
            "grounding": self.grounding.to_json(),
        }


def run_training(
    config: ExperimentConfig,
    on_record: Optional[Callable[[MetricsRecord], None]] = None,
) -> TrainingSession:
    """Step a fresh session through the configured episode budget."""
    session = TrainingSession(config)
    for _ in range(config.episodes):
        record = session.step()
        if on_record is not None:
            on_record(record)
    return session


def full_discovery_episode(records: Iterable[MetricsRecord], total: int) -> Optional[int]:
    """First episode after which every valid configuration was discovered."""
    for record in records:
        if record.discovered == total:
            return record.episode
    return None


# --- artifact files -------------------------------------------------------------------


def metrics_lines(records: Iterable[MetricsRecord]) -> str:
    return "".join(
        json.dumps(record.to_json(), sort_keys=True, separators=(",", ":")) + "\n"
        for record in records
    )


def write_metrics(records: Iterable[MetricsRecord], path: Path) -> None:
    path.write_text(metrics_lines(records), encoding="utf-8")


def load_metrics(path: Path) -> list[MetricsRecord]:
    return [
        MetricsRecord.from_json(json.loads(line))
        for line in path.read_text(encoding="utf-8").splitlines()
        if line
    ]


def summarize(session: TrainingSession) -> dict:
    records = session.records
    modes = {mode: sum(1 for r in records if r.mode == mode) for mode in MODES}
    return {
        "config": session.config.to_json(),
        "episodes": len(records),
        "discovered": len(session.learner.discovered),
        "reachable": len(session.graph.nodes),
        "full_discovery_episode": full_discovery_episode(records, len(session.graph.nodes)),
        "success_rate": (
            sum(r.success for r in records) / len(records) if records else None
        ),
        "episodes_by_mode": modes,
        "sentences_grounded": session.grounding.converged_count(),
    }


def write_run_outputs(session: TrainingSession, out_dir: Path, wall_clock: float) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_metrics(session.records, out_dir / "metrics.jsonl")
    summary = summarize(session)
    summary["wall_clock_seconds"] = round(wall_clock, 3)
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return summary


def save_snapshot(session: TrainingSession, path: Path) -> None:
    path.write_text(json.dumps(session.snapshot(), sort_keys=True), encoding="utf-8")


def load_snapshot(path: Path) -> tuple[ExperimentConfig, LearnerState]:
    data = json.loads(path.read_text(encoding="utf-8"))
    config = ExperimentConfig.from_json(data["config"])
    return config, LearnerState.from_json(data["learner"])


EVAL_FIELDS = ("setup", "attempts", "rate", "stderr")


def write_eval_csv(rows: Sequence[dict], path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=EVAL_FIELDS)
        writer.writeheader()
        writer.writerows(rows)


# --- evaluation setups -------------------------------------------------------------------


def eval_transition(
    learner: LearnerState,
    competence: CompetenceModel,
    attempts: int,
    seed: int,
    trials: int = 5,
    max_moves: int = 8,
) -> float:
    """Mean success over every inventory sentence, `trials` scatter resets each.

    Streams are derived per (sentence, trial), never from the attempt budget,
    so a 1-attempt success is always also a 5-attempt success.
    """
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    inventory = build_inventory(learner.n_blocks)
    successes = 0
    total = 0
    for sentence in inventory:
        for trial in range(trials):
            rng = random.Random(derive_seed(seed, "transition", sentence.text, trial))
            probe = learner.copy()
            probe.scene = set_scene(RandomScatter(), probe.n_blocks, rng)
            ok, _ = follow_instruction(
                Leaf(sentence.text),
                probe,
                competence,
                rng,
                attempts=attempts,
                max_moves=max_moves,
                source=inventory,
            )
            successes += ok
            total += 1
    return successes / total


def eval_expression(
    learner: LearnerState,
    competence: CompetenceModel,
    attempts: int,
    seed: int,
    n_expressions: int = 500,
    max_moves: int = 8,
) -> float:
    """Mean success over randomly sampled logical expressions of sentences.

    Unsatisfiable expressions count as failures; that they occur at all is the
    intended extra difficulty of this setup.
    """
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    inventory = build_inventory(learner.n_blocks)
    successes = 0
    for index in range(n_expressions):
        rng = random.Random(derive_seed(seed, "expression", index))
        expression = sample_expression(rng, inventory)
        probe = learner.copy()
        probe.scene = set_scene(RandomScatter(), probe.n_blocks, rng)
        ok, _ = follow_instruction(
            expression,
            probe,
            competence,
            rng,
            attempts=attempts,
            max_moves=max_moves,
            source=inventory,
        )
        successes += ok
    return successes / n_expressions


def eval_sequence_streaks(
    learner: LearnerState,
    competence: CompetenceModel,
    seed: int,
    n_agents: int = 10,
    seq_len: int = 20,
    attempts: int = 5,
    max_moves: int = 8,
) -> list[int]:
    """Consecutive instruction successes per agent, no scene resets within an agent."""
    inventory = build_inventory(learner.n_blocks)
    texts = inventory.texts()
    streaks = []
    for agent in range(n_agents):
        rng = random.Random(derive_seed(seed, "sequence", agent))
        probe = learner.copy()
        probe.scene = set_scene(RandomScatter(), probe.n_blocks, rng)
        streak = 0
        for _ in range(seq_len):
            text = rng.choice(texts)
            ok, _ = follow_instruction(
                Leaf(text),
                probe,
                competence,
                rng,
                attempts=attempts,
                max_moves=max_moves,
                source=inventory,
            )
            if not ok:
                break
            streak += 1
        streaks.append(streak)
    return streaks


def eval_sequence(
    learner: LearnerState,
    competence: CompetenceModel,
    seed: int,
    n_agents: int = 10,
    seq_len: int = 20,
    attempts: int = 5,
    max_moves: int = 8,
) -> float:
    """Mean count of consecutive instruction successes without scene resets."""
    return statistics.fmean(
        eval_sequence_streaks(learner, competence, seed, n_agents, seq_len, attempts, max_moves)
    )


def expected_consecutive(q: float, seq_len: int) -> float:
    """Closed-form mean streak length for i.i.d. per-instruction success q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    return sum(q**k for k in range(1, seq_len + 1))


# --- the social-rate sweep -------------------------------------------------------------------

DEFAULT_BETAS = (0.0, 0.1, 0.2, 0.5, 0.8, 1.0)


def hard_setting(episodes: int = 400, **overrides) -> ExperimentConfig:
    """Low exploration, progress-driven curriculum: the regime where help shows."""
    params = dict(episodes=episodes, epsilon=0.05, curriculum="learning_progress")
    params.update(overrides)
    return ExperimentConfig(**params)


@dataclass(frozen=True)
class SweepPoint:
    beta: float
    seed: int
    episodes: int  # episodes until full discovery, == budget when censored
    censored: bool

    def to_json(self) -> dict:
        return {
            "beta": self.beta,
            "seed": self.seed,
            "episodes": self.episodes,
            "censored": self.censored,
        }


def episodes_to_full_discovery(config: ExperimentConfig) -> tuple[int, bool]:
    session = TrainingSession(config)
    for _ in range(config.episodes):
        record = session.step()
        if record.discovered == len(session.graph.nodes):
            return record.episode, False
    return config.episodes, True


def sweep_beta(
    betas: Sequence[float] = DEFAULT_BETAS,
    seeds: Sequence[int] = tuple(range(10)),
    base: Optional[ExperimentConfig] = None,
) -> tuple[SweepPoint, ...]:
    """Episodes-to-full-discovery per (social rate, seed), censored at budget."""
    base = hard_setting() if base is None else base
    points = []
    for beta in betas:
        for seed in seeds:
            config = replace(base, beta=beta, seed=seed)
            episodes, censored = episodes_to_full_discovery(config)
            points.append(SweepPoint(beta, seed, episodes, censored))
            log.info("beta=%s seed=%s -> %s%s", beta, seed, episodes,
                     " (censored)" if censored else "")
    return tuple(points)


def summarize_sweep(points: Iterable[SweepPoint]) -> dict[float, dict]:
    by_beta: dict[float, list[SweepPoint]] = {}
    for point in points:
        by_beta.setdefault(point.beta, []).append(point)
    table = {}
    for beta in sorted(by_beta):
        episodes = [p.episodes for p in by_beta[beta]]
        mean = statistics.fmean(episodes)
        stderr = (
            statistics.stdev(episodes) / math.sqrt(len(episodes))
            if len(episodes) > 1
            else 0.0
        )
        table[beta] = {
            "mean": mean,
            "stderr": stderr,
            "runs": len(episodes),
            "censored": sum(p.censored for p in by_beta[beta]),
        }
    return table


# --- the scene-setting ablation -------------------------------------------------------------------


def contains_stack2(config: Configuration) -> bool:
    """Some block sits on another (any above predicate holds)."""
    n = config.n_blocks
    return any(config.above(a, b) for a in range(n) for b in range(n) if a != b)


def contains_stack3(config: Configuration) -> bool:
    """Some three blocks form a chain: a on b on c."""
    n = config.n_blocks
    return any(
        config.above(a, b) and config.above(b, c)
        for a in range(n)
        for b in range(n)
        for c in range(n)
        if len({a, b, c}) == 3
    )


@dataclass(frozen=True)
class AblationPoint:
    strategy: str
    seed: int
    stack2_episode: Optional[int]  # None when censored at budget
    stack3_episode: Optional[int]

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed": self.seed,
            "stack2_episode": self.stack2_episode,
            "stack3_episode": self.stack3_episode,
        }


def first_discovery_episodes(config: ExperimentConfig) -> AblationPoint:
    """First episodes at which a 2-stack and a 3-stack configuration appear."""
    session = TrainingSession(config)
    stack2 = stack3 = None
    for _ in range(config.episodes):
        record = session.step()
        if stack2 is None and any(contains_stack2(c) for c in session.learner.discovered):
            stack2 = record.episode
        if stack3 is None and any(contains_stack3(c) for c in session.learner.discovered):
            stack3 = record.episode
        if stack2 is not None and stack3 is not None:
            break
    return AblationPoint(config.scene_strategy, config.seed, stack2, stack3)


def ablation_scene_setting(
    strategies: Sequence[str] = ("random_scatter", "pre_stacked_2"),
    seeds: Sequence[int] = tuple(range(20)),
    base: Optional[ExperimentConfig] = None,
) -> tuple[AblationPoint, ...]:
    base = ExperimentConfig(episodes=300, beta=0.0) if base is None else base
    points = []
    for strategy in strategies:
        for seed in seeds:
            config = replace(base, scene_strategy=strategy, seed=seed)
            point = first_discovery_episodes(config)
            points.append(point)
            log.info("strategy=%s seed=%s -> stack2=%s stack3=%s",
                     strategy, seed, point.stack2_episode, point.stack3_episode)
    return tuple(points)


def ablation_sign_test(
    points: Iterable[AblationPoint],
    faster: str = "pre_stacked_2",
    slower: str = "random_scatter",
    budget: int = 300,
) -> float:
    """One-sided paired sign test that `faster` discovers 3-stacks earlier.

    Censored runs count as budget + 1 so they lose every comparison; ties are
    dropped, the usual sign-test convention.
    """
    by_key = {(p.strategy, p.seed): p for p in points}
    wins = losses = 0
    for (strategy, seed), point in sorted(by_key.items()):
        if strategy != faster or (slower, seed) not in by_key:
            continue
        a = point.stack3_episode if point.stack3_episode is not None else budget + 1
        b = by_key[(slower, seed)].stack3_episode
        b = b if b is not None else budget + 1
        if a < b:
            wins += 1
        elif a > b:
            losses += 1
    if wins + losses == 0:
        return 1.0
    return binomtest(wins, wins + losses, 0.5, alternative="greater").pvalue


# --- competence calibration -------------------------------------------------------------------


def calibrate_competence(
    target: float = 0.89,
    seeds: Sequence[int] = (0, 1, 2),
    base: Optional[ExperimentConfig] = None,
    p0: float = CALIBRATED_P0,
    tau: float = CALIBRATED_TAU,
    rounds: int = 8,
) -> CompetenceModel:
    """Bisect p_max until trained single-attempt instruction success hits target.

    The trained rate is monotone in p_max, which is what makes bisection sound.
    Run once, freeze the result; this is a stand-in for skill acquisition, not
    a learned quantity.
    """
    base = ExperimentConfig() if base is None else base
    lo, hi = p0, 0.999

    def trained_rate(p_max: float) -> float:
        rates = []
        for seed in seeds:
            config = replace(base, p0=p0, p_max=p_max, tau=tau, seed=seed)
            session = run_training(config)
            rates.append(eval_transition(session.learner, session.competence, 1, seed))
        return statistics.fmean(rates)

    for _ in range(rounds):
        mid = (lo + hi) / 2
        rate = trained_rate(mid)
        log.info("calibration: p_max=%.4f -> rate=%.4f", mid, rate)
        if rate < target:
            lo = mid
        else:
            hi = mid
    return CompetenceModel(p0=p0, p_max=(lo + hi) / 2, tau=tau)
