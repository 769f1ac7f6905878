"""The social partner: models the learner, proposes frontier goals, sets scenes.

The tutor keeps a copy of the learner's discovered goal set, schedules social
episodes at a configurable rate, communicates (frontier, beyond) goal pairs
from the edge of the learner's knowledge, arranges initial scenes, and
verbalizes observed transitions as sentences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from blocktutor.goal_graph import GoalGraph, UnknownGoalError, build_goal_graph
from blocktutor.learner import (
    CompetenceModel,
    EpisodeOutcome,
    FrontierPair,
    LearnerState,
    internalize,
    run_episode,
)
from blocktutor.semantics import (
    Configuration,
    Scene,
    Single,
    Stack,
    check_world_size,
    realize_config,
    set_partitions,
)

DEFAULT_MAX_MOVES = 8

SOCIAL = "social"
AUTOTELIC = "autotelic"


class InfeasibleInterventionError(ValueError):
    """The requested scene intervention cannot produce a scene."""


@dataclass
class TutorModel:
    """The tutor's beliefs: the full goal graph plus the learner's known set."""

    full_graph: GoalGraph
    believed_discovered: set[Configuration] = field(default_factory=set)
    social_rate_beta: float = 0.2

    def __post_init__(self):
        if not 0.0 <= self.social_rate_beta <= 1.0:
            raise ValueError(f"beta must lie in [0,1], got {self.social_rate_beta}")
        stray = {c for c in self.believed_discovered if c not in self.full_graph}
        if stray:
            raise UnknownGoalError(f"{min(stray)} is not a valid configuration of this world")

    @classmethod
    def for_learner(cls, learner: LearnerState, beta: float) -> "TutorModel":
        return cls(
            full_graph=build_goal_graph(learner.n_blocks),
            believed_discovered=set(learner.discovered),
            social_rate_beta=beta,
        )


@dataclass(frozen=True)
class RandomScatter:
    """All blocks as singles, grouped into uniformly random proximity clusters."""


@dataclass(frozen=True)
class PreStacked:
    """A random k-block stack already built, remaining blocks scattered far."""

    k: int


@dataclass(frozen=True)
class NearGoal:
    """A scene at graph distance at most `distance` from the given goal."""

    goal: Configuration
    distance: int


SceneIntervention = Union[RandomScatter, PreStacked, NearGoal]


@dataclass(frozen=True)
class SocialEpisodeResult:
    """One social episode: the communicated pair and what the learner did."""

    pair: Optional[FrontierPair]
    outcomes: tuple[EpisodeOutcome, ...]
    internalized: bool

    @property
    def frontier_success(self) -> bool:
        return bool(self.outcomes) and self.outcomes[0].success

    @property
    def beyond_success(self) -> bool:
        return len(self.outcomes) == 2 and self.outcomes[1].success


def observe(model: TutorModel, outcome: EpisodeOutcome) -> TutorModel:
    """Fold an observed episode into the tutor's model of the learner."""
    model.believed_discovered |= outcome.newly_discovered
    model.believed_discovered |= set(outcome.trajectory)
    return model


def propose_hme_goals(model: TutorModel, rng) -> Optional[FrontierPair]:
    """A uniformly chosen (frontier, beyond) pair; None once nothing is beyond."""
    pairs = model.full_graph.frontier_pairs(model.believed_discovered)
    if not pairs:
        return None
    frontier, beyond = rng.choice(pairs)
    return FrontierPair(frontier, beyond)


def run_social_episode(
    model: TutorModel,
    learner: LearnerState,
    competence: CompetenceModel,
    rng,
    max_moves: int = DEFAULT_MAX_MOVES,
) -> SocialEpisodeResult:
    """One tutor-driven episode: frontier goal first, beyond goal on success.

    The learner pursues the frontier goal from its current scene.  Only if it
    gets there does the tutor reveal the beyond goal, which the learner pursues
    immediately and internalizes as a rehearsal pair.  The tutor observes every
    outcome; with an empty frontier (space fully discovered) nothing runs.
    """
    pair = propose_hme_goals(model, rng)
    if pair is None:
        return SocialEpisodeResult(pair=None, outcomes=(), internalized=False)
    first = run_episode(learner, learner.scene, pair.frontier, competence, max_moves, rng)
    observe(model, first)
    if not first.success:
        return SocialEpisodeResult(pair=pair, outcomes=(first,), internalized=False)
    internalize(learner, pair)
    model.believed_discovered |= {pair.frontier, pair.beyond}
    second = run_episode(learner, learner.scene, pair.beyond, competence, max_moves, rng)
    observe(model, second)
    return SocialEpisodeResult(pair=pair, outcomes=(first, second), internalized=True)


def schedule(model: TutorModel, rng) -> str:
    """social with probability beta, autotelic otherwise."""
    return SOCIAL if rng.random() < model.social_rate_beta else AUTOTELIC


def _all_singles_scenes(n_blocks: int) -> list[Scene]:
    scenes = [
        Scene.of([[Single(b) for b in group] for group in partition])
        for partition in set_partitions(tuple(range(n_blocks)))
    ]
    return sorted(scenes)


def set_scene(intervention: SceneIntervention, n_blocks: int, rng) -> Scene:
    """Arrange an initial scene according to the tutor's intervention strategy."""
    check_world_size(n_blocks)
    if isinstance(intervention, RandomScatter):
        return rng.choice(_all_singles_scenes(n_blocks))
    if isinstance(intervention, PreStacked):
        k = intervention.k
        if not 2 <= k <= n_blocks:
            raise InfeasibleInterventionError(
                f"a pre-built stack needs 2..{n_blocks} blocks, got {k}"
            )
        order = rng.sample(range(n_blocks), k)
        rest = sorted(set(range(n_blocks)) - set(order))
        return Scene.of([[Stack(tuple(order))]] + [[Single(b)] for b in rest])
    if isinstance(intervention, NearGoal):
        if intervention.distance < 0:
            raise InfeasibleInterventionError("distance must be nonnegative")
        graph = build_goal_graph(n_blocks)
        if intervention.goal not in graph:
            raise InfeasibleInterventionError(
                f"{intervention.goal} is not a valid configuration of this world"
            )
        ball = sorted(
            c for c in graph.nodes
            if graph.distance(c, intervention.goal) <= intervention.distance
        )
        return realize_config(rng.choice(ball))
    raise InfeasibleInterventionError(f"unknown intervention {intervention!r}")


def describe(
    before: Configuration,
    after: Configuration,
    inventory: Sequence,
    rng,
):
    """A sentence naming one uniformly chosen changed predicate; None if none changed.

    Inventory entries expose `predicate` and `target`; the returned entry's
    transformation always matches a predicate that actually changed.
    """
    changed = before.changed_predicates(after)
    if not changed:
        return None
    predicate, value = rng.choice(changed)
    candidates = [s for s in inventory if s.predicate == predicate and s.target == value]
    if not candidates:
        return None
    return rng.choice(candidates)
