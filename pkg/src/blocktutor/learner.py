"""The autotelic learner: goal sampling, stochastic episodes, hindsight discovery.

The learner samples its own goals from what it has discovered, plans over the
part of the goal graph it knows, and executes moves that succeed with a
practice-dependent probability.  Every configuration visited along the way is
credited as if it had been the goal, which is how the discovered set grows.
Tutor-communicated goal pairs are memorized and rehearsed until mastered.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from blocktutor.goal_graph import GoalGraph, UnknownGoalError, build_goal_graph
from blocktutor.semantics import (
    Configuration,
    Scene,
    apply_move,
    extract_config,
    legal_moves,
    realize_config,
)

log = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.2
LP_WINDOW = 20  # per-goal success history length for learning progress
LP_FLOOR = 0.05
MASTERY_STREAK = 3  # consecutive rehearsal successes before a pair counts as mastered


@dataclass(frozen=True)
class CompetenceModel:
    """Saturating per-edge success curve: p(k) = p0 + (p_max - p0)(1 - exp(-k/tau))."""

    p0: float
    p_max: float
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.p0 <= self.p_max <= 1.0:
            raise ValueError(f"need 0 <= p0 <= p_max <= 1, got p0={self.p0} p_max={self.p_max}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")

    def probability(self, attempts: int) -> float:
        return self.p0 + (self.p_max - self.p0) * (1.0 - math.exp(-attempts / self.tau))


@dataclass(frozen=True)
class FrontierPair:
    """A discovered goal next to unexplored territory, and the neighbor past it."""

    frontier: Configuration
    beyond: Configuration

    def to_json(self) -> dict:
        return {"frontier": self.frontier.bitstring(), "beyond": self.beyond.bitstring()}


@dataclass
class InternalizedPair:
    pair: FrontierPair
    mastered: bool = False
    streak: int = 0


@dataclass(frozen=True)
class EpisodeOutcome:
    """What one episode did: where it went and what it turned up."""

    goal: Configuration
    success: bool
    trajectory: tuple[Configuration, ...]
    moves_used: int
    newly_discovered: frozenset[Configuration]

    def to_json(self) -> dict:
        return {
            "goal": self.goal.bitstring(),
            "success": self.success,
            "trajectory": [c.bitstring() for c in self.trajectory],
            "moves_used": self.moves_used,
            "newly_discovered": sorted(c.bitstring() for c in self.newly_discovered),
        }


@dataclass
class LearnerState:
    """Everything the learner carries between episodes.

    Confined to one session at a time; all randomness flows through rng objects
    handed to the operations, never module-level state.
    """

    n_blocks: int
    seed: int
    epsilon: float = DEFAULT_EPSILON
    scene: Scene = None  # type: ignore[assignment]
    discovered: set[Configuration] = field(default_factory=set)
    edge_stats: dict[tuple[Configuration, Configuration], tuple[int, int]] = field(
        default_factory=dict
    )
    goal_stats: dict[Configuration, deque] = field(default_factory=dict)
    internalized: list[InternalizedPair] = field(default_factory=list)

    def __post_init__(self):
        if self.scene is None:
            self.scene = Scene.scattered(self.n_blocks)
        if not self.discovered:
            self.discovered = {extract_config(self.scene)}

    @property
    def current(self) -> Configuration:
        return extract_config(self.scene)

    def edge_attempts(self, u: Configuration, v: Configuration) -> int:
        return self.edge_stats.get(_edge_key(u, v), (0, 0))[0]

    def record_attempt(self, u: Configuration, v: Configuration, success: bool) -> None:
        key = _edge_key(u, v)
        attempts, successes = self.edge_stats.get(key, (0, 0))
        self.edge_stats[key] = (attempts + 1, successes + int(success))

    def learning_progress(self, goal: Configuration) -> float:
        """Absolute difference between recent and older success rates for the goal."""
        history = list(self.goal_stats.get(goal, ()))
        half = LP_WINDOW // 2
        recent = history[-half:]
        older = history[-LP_WINDOW:-half]
        recent_rate = sum(recent) / len(recent) if recent else 0.0
        older_rate = sum(older) / len(older) if older else 0.0
        return abs(recent_rate - older_rate)

    def credit(self, goal: Configuration, success: bool) -> None:
        self.goal_stats.setdefault(goal, deque(maxlen=LP_WINDOW)).append(int(success))

    def copy(self) -> "LearnerState":
        """Independent copy: mutable containers duplicated, immutable values shared."""
        return LearnerState(
            n_blocks=self.n_blocks,
            seed=self.seed,
            epsilon=self.epsilon,
            scene=self.scene,
            discovered=set(self.discovered),
            edge_stats=dict(self.edge_stats),
            goal_stats={g: deque(h, maxlen=LP_WINDOW) for g, h in self.goal_stats.items()},
            internalized=[
                InternalizedPair(item.pair, item.mastered, item.streak)
                for item in self.internalized
            ],
        )

    def to_json(self) -> dict:
        return {
            "n_blocks": self.n_blocks,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "scene": self.scene.to_json(),
            "current": self.current.bitstring(),
            "discovered": sorted(c.bitstring() for c in self.discovered),
            "edge_stats": [
                {
                    "edge": [u.bitstring(), v.bitstring()],
                    "attempts": attempts,
                    "successes": successes,
                }
                for (u, v), (attempts, successes) in sorted(self.edge_stats.items())
            ],
            "goal_stats": [
                {"goal": g.bitstring(), "history": list(h)}
                for g, h in sorted(self.goal_stats.items())
            ],
            "internalized": [
                {**item.pair.to_json(), "mastered": item.mastered, "streak": item.streak}
                for item in self.internalized
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LearnerState":
        bits = Configuration.from_string
        return cls(
            n_blocks=data["n_blocks"],
            seed=data["seed"],
            epsilon=data["epsilon"],
            scene=Scene.from_json(data["scene"]),
            discovered={bits(b) for b in data["discovered"]},
            edge_stats={
                (bits(entry["edge"][0]), bits(entry["edge"][1])): (
                    entry["attempts"],
                    entry["successes"],
                )
                for entry in data["edge_stats"]
            },
            goal_stats={
                bits(entry["goal"]): deque(entry["history"], maxlen=LP_WINDOW)
                for entry in data["goal_stats"]
            },
            internalized=[
                InternalizedPair(
                    FrontierPair(bits(entry["frontier"]), bits(entry["beyond"])),
                    mastered=entry["mastered"],
                    streak=entry["streak"],
                )
                for entry in data["internalized"]
            ],
        )


def _edge_key(u: Configuration, v: Configuration) -> tuple[Configuration, Configuration]:
    return (u, v) if u < v else (v, u)


def plan_within(
    graph: GoalGraph,
    start: Configuration,
    goal: Configuration,
    allowed: Iterable[Configuration],
) -> Optional[tuple[Configuration, ...]]:
    """Shortest path start -> goal using only allowed nodes; None if unreachable.

    Same deterministic tie-break as the full graph: lexicographically smallest
    next configuration among those that shrink the remaining distance.
    """
    nodes = set(allowed)
    nodes.add(start)
    if goal not in nodes or goal not in graph:
        return None
    dist = {goal: 0}
    frontier = deque([goal])
    while frontier:
        u = frontier.popleft()
        for v in graph.neighbors(u):
            if v in nodes and v not in dist:
                dist[v] = dist[u] + 1
                frontier.append(v)
    if start not in dist:
        return None
    path = [start]
    current = start
    while current != goal:
        current = min(
            v for v in graph.neighbors(current) if dist.get(v, -1) == dist[current] - 1
        )
        path.append(current)
    return tuple(path)


def sample_goal(state: LearnerState, strategy: str, rng, lp_floor: float = LP_FLOOR) -> Configuration:
    """Pick the next goal to pursue.

    uniform: uniform over discovered goals.  learning_progress: probability
    proportional to |recent rate - older rate| + lp_floor.  random_config:
    uniform over every valid configuration, discovered or not.

    A goal demands a transformation, so the current configuration is never a
    candidate; while no other goal is discovered yet, both curricula fall back
    to random_config (the bootstrap: random goals first, curriculum after).
    """
    graph = build_goal_graph(state.n_blocks)
    if strategy == "random_config":
        return rng.choice(graph.nodes)
    if strategy not in ("uniform", "learning_progress"):
        raise ValueError(f"unknown goal sampling strategy {strategy!r}")
    goals = sorted(state.discovered - {state.current})
    if not goals:
        log.info("no pursuable discovered goals; falling back to random_config sampling")
        return rng.choice(graph.nodes)
    if strategy == "uniform":
        return rng.choice(goals)
    weights = [state.learning_progress(g) + lp_floor for g in goals]
    total = sum(weights)
    if total <= 0:
        return rng.choice(goals)
    return rng.choices(goals, weights=weights, k=1)[0]


def run_episode(
    state: LearnerState,
    initial: Scene,
    goal: Configuration,
    competence: CompetenceModel,
    max_moves: int,
    rng,
    epsilon: float | None = None,
) -> EpisodeOutcome:
    """Pursue one goal from an initial scene with stochastic move execution.

    Each step either explores (probability epsilon: uniformly random legal
    move) or takes the first move of the shortest plan through discovered
    configurations plus the current scene's one-move neighborhood.  An intended
    move succeeds with probability p(k) where k is that edge's practice count;
    failure leaves the scene unchanged but consumes budget.  Every visited
    configuration is discovered and credited as a hindsight success.
    """
    if max_moves < 1:
        raise ValueError(f"max_moves must be >= 1, got {max_moves}")
    graph = build_goal_graph(state.n_blocks)
    if goal not in graph:
        raise UnknownGoalError(f"{goal} is not a valid configuration of this world")
    eps = state.epsilon if epsilon is None else epsilon

    state.scene = initial
    current = extract_config(initial)
    trajectory = [current]
    moves_used = 0

    while current != goal and moves_used < max_moves:
        moves = legal_moves(state.scene)
        if rng.random() < eps:
            move = rng.choice(moves)
            intended = extract_config(apply_move(state.scene, move))
        else:
            allowed = state.discovered | set(graph.neighbors(current))
            path = plan_within(graph, current, goal, allowed)
            if path is None:
                move = rng.choice(moves)
                intended = extract_config(apply_move(state.scene, move))
            else:
                intended = path[1]
                move = next(
                    m for m in moves
                    if extract_config(apply_move(state.scene, m)) == intended
                )
        p = competence.probability(state.edge_attempts(current, intended))
        succeeded = rng.random() < p
        state.record_attempt(current, intended, succeeded)
        moves_used += 1
        if succeeded:
            state.scene = apply_move(state.scene, move)
            current = intended
            trajectory.append(current)

    success = current == goal
    visited = []
    seen: set[Configuration] = set()
    for c in trajectory:
        if c not in seen:
            seen.add(c)
            visited.append(c)
    newly = frozenset(seen - state.discovered)
    state.discovered |= seen
    for c in visited:
        state.credit(c, True)
    if not success:
        state.credit(goal, False)
    return EpisodeOutcome(
        goal=goal,
        success=success,
        trajectory=tuple(trajectory),
        moves_used=moves_used,
        newly_discovered=newly,
    )


def internalize(state: LearnerState, pair: FrontierPair) -> LearnerState:
    """Memorize a tutor-communicated (frontier, beyond) pair for later rehearsal.

    Duplicates are dropped.  A pair whose beyond goal some mastered pair already
    covers arrives mastered.  Both configurations join the discovered set.
    """
    state.discovered |= {pair.frontier, pair.beyond}
    if any(item.pair == pair for item in state.internalized):
        return state
    already_mastered = any(
        item.mastered and item.pair.beyond == pair.beyond for item in state.internalized
    )
    state.internalized.append(InternalizedPair(pair, mastered=already_mastered))
    return state


def rehearse(
    state: LearnerState,
    competence: CompetenceModel,
    rng,
    mastery_streak: int = MASTERY_STREAK,
) -> Optional[EpisodeOutcome]:
    """Practice the oldest unmastered internalized pair; None when nothing is left.

    Rehearsal is focused: the scene is set to the frontier goal and the learner
    gets exactly one non-exploratory move toward the beyond goal.  A pair
    becomes mastered after `mastery_streak` consecutive successes; a failure
    resets the streak.
    """
    item = next((it for it in state.internalized if not it.mastered), None)
    if item is None:
        return None
    outcome = run_episode(
        state,
        realize_config(item.pair.frontier),
        item.pair.beyond,
        competence,
        max_moves=1,
        rng=rng,
        epsilon=0.0,
    )
    if outcome.success:
        item.streak += 1
        if item.streak >= mastery_streak:
            item.mastered = True
    else:
        item.streak = 0
    return outcome


def estimated_competence(
    state: LearnerState,
    graph: GoalGraph,
    goal: Configuration,
    competence: CompetenceModel,
) -> float:
    """Product of per-edge success probabilities along the discovered-graph plan.

    1.0 when the goal is the current configuration, 0.0 when the discovered
    graph does not connect the current configuration to the goal.
    """
    if goal not in graph:
        raise UnknownGoalError(f"{goal} is not a valid configuration of this world")
    current = state.current
    if goal == current:
        return 1.0
    path = plan_within(graph, current, goal, state.discovered | {current})
    if path is None:
        return 0.0
    result = 1.0
    for u, v in zip(path, path[1:]):
        result *= competence.probability(state.edge_attempts(u, v))
    return result
