"""Sentences, grounding, symbolic induction, logical expressions, instructions.

Every sentence in the inventory names one predicate shift ("get red above
green" asks for above(red,green) to become 1).  Grounding a sentence yields all
compatible configurations from a universe; logical combinations compose by set
algebra with complement taken inside the discovered set.  The learner can also
induce the hidden sentence-to-shift mapping from observed (before, sentence,
after) data by intersecting candidate sets.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Iterator, Optional, Sequence, Union

from blocktutor.goal_graph import GoalGraph, build_goal_graph
from blocktutor.learner import (
    CompetenceModel,
    LearnerState,
    estimated_competence,
    plan_within,
    run_episode,
)
from blocktutor.semantics import (
    COLOR_NAMES,
    Configuration,
    Predicate,
    above_pairs,
    block_name,
    check_world_size,
    close_pairs,
)

log = logging.getLogger(__name__)

INVENTORY_FILE = "sentences_n3.json"

# Surface templates: 7 close forms and 5 above forms per polarity.  For close,
# some forms swap the (symmetric) argument order.  3 close pairs x 2 x 7 plus
# 6 above pairs x 2 x 5 gives the canonical 102 sentences at n=3.
CLOSE_TEMPLATES = {
    1: [
        ("get {x} close to {y}", False),
        ("put {x} close to {y}", False),
        ("bring {x} near {y}", False),
        ("move {x} next to {y}", False),
        ("put {x} beside {y}", True),
        ("place {x} near {y}", True),
        ("bring {x} and {y} together", True),
    ],
    0: [
        ("get {x} away from {y}", False),
        ("move {x} away from {y}", False),
        ("take {x} far from {y}", False),
        ("keep {x} far from {y}", True),
        ("separate {x} from {y}", True),
        ("split {x} and {y} apart", False),
        ("place {x} far from {y}", True),
    ],
}
ABOVE_TEMPLATES = {
    1: [
        "get {x} above {y}",
        "put {x} above {y}",
        "put {x} on top of {y}",
        "stack {x} on {y}",
        "set {x} onto {y}",
    ],
    0: [
        "get {x} off {y}",
        "take {x} off {y}",
        "remove {x} from {y}",
        "unstack {x} from {y}",
        "bring {x} down from {y}",
    ],
}


class InventoryLoadError(ValueError):
    """The shipped sentence table is malformed or fails its counts."""


class InconsistentDataError(ValueError):
    """A training example contradicts everything a sentence could still mean."""


class NotYetGroundedError(LookupError):
    """A sentence has no converged transformation in the grounding table."""


class NoCompatibleGoalError(ValueError):
    """An instruction grounds to the empty set of goals."""


class ExpressionParseError(ValueError):
    """Wire-format expression JSON does not describe a valid expression tree."""


@dataclass(frozen=True)
class Sentence:
    """One surface form and its hidden transformation (predicate, target value)."""

    text: str
    predicate: Predicate
    target: int

    def to_json(self) -> dict:
        return {"text": self.text, "predicate": self.predicate.text(), "target": self.target}


class Inventory:
    """The sentence table: a sequence of Sentences with text lookup."""

    def __init__(self, sentences: Sequence[Sentence]):
        self.sentences = tuple(sentences)
        self._by_text = {s.text: s for s in self.sentences}
        if len(self._by_text) != len(self.sentences):
            raise InventoryLoadError("duplicate surface text in inventory")

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __contains__(self, text: str) -> bool:
        return text in self._by_text

    def lookup(self, text: str) -> Sentence:
        try:
            return self._by_text[text]
        except KeyError:
            raise InventoryLoadError(f"sentence {text!r} is not in the inventory") from None

    def transformation(self, text: str) -> tuple[Predicate, int]:
        sentence = self.lookup(text)
        return (sentence.predicate, sentence.target)

    def texts(self) -> tuple[str, ...]:
        return tuple(s.text for s in self.sentences)


def generate_inventory(n_blocks: int) -> Inventory:
    """Build the sentence table for any world size from the surface templates."""
    check_world_size(n_blocks)
    sentences = []
    for a, b in close_pairs(n_blocks):
        predicate = Predicate("close", a, b)
        for target in (1, 0):
            for template, swap in CLOSE_TEMPLATES[target]:
                x, y = (block_name(b), block_name(a)) if swap else (block_name(a), block_name(b))
                sentences.append(Sentence(template.format(x=x, y=y), predicate, target))
    for a, b in above_pairs(n_blocks):
        predicate = Predicate("above", a, b)
        for target in (1, 0):
            for template in ABOVE_TEMPLATES[target]:
                sentences.append(
                    Sentence(template.format(x=block_name(a), y=block_name(b)), predicate, target)
                )
    return Inventory(sentences)


def _inventory_from_json(data: object) -> Inventory:
    if not isinstance(data, list):
        raise InventoryLoadError("inventory file must hold a JSON list")
    sentences = []
    for entry in data:
        try:
            sentences.append(
                Sentence(entry["text"], Predicate.parse(entry["predicate"]), int(entry["target"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InventoryLoadError(f"malformed inventory entry {entry!r}: {exc}") from exc
    for s in sentences:
        if s.target not in (0, 1):
            raise InventoryLoadError(f"target must be 0 or 1 in {s.text!r}")
    return Inventory(sentences)


@lru_cache(maxsize=None)
def build_inventory(n_blocks: int = 3) -> Inventory:
    """The canonical inventory: loaded from the shipped table at n=3, else generated."""
    check_world_size(n_blocks)
    if n_blocks != 3:
        return generate_inventory(n_blocks)
    raw = resources.files("blocktutor.data").joinpath(INVENTORY_FILE).read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InventoryLoadError(f"inventory file is not valid JSON: {exc}") from exc
    inventory = _inventory_from_json(data)
    if len(inventory) != 102:
        raise InventoryLoadError(f"n=3 inventory must hold 102 sentences, found {len(inventory)}")
    covered = {(s.predicate, s.target) for s in inventory}
    expected = 2 * (len(close_pairs(3)) + len(above_pairs(3)))
    if len(covered) != expected:
        raise InventoryLoadError("inventory does not cover every (predicate, shift) pair")
    return inventory


# --- oracle grounding ---------------------------------------------------------


def oracle_ground(
    sentence: Sentence,
    current: Configuration,
    universe: Iterable[Configuration],
    require_change: bool = True,
) -> frozenset[Configuration]:
    """All configurations in the universe compatible with the sentence.

    A sentence demands a transformation, so with require_change (the default)
    the current configuration is excluded even when it already satisfies the
    named predicate value.
    """
    matches = {c for c in universe if c.value(sentence.predicate) == sentence.target}
    if require_change:
        matches.discard(current)
    return frozenset(matches)


# --- symbolic induction ---------------------------------------------------------


class GroundingTable:
    """Induced sentence meanings: per-text candidate transformation sets.

    Candidates only shrink; a sentence is converged once exactly one candidate
    remains.  With oracle-generated data the survivor is the true transformation.
    """

    def __init__(self):
        self._candidates: dict[str, frozenset[tuple[Predicate, int]]] = {}

    def candidates(self, text: str) -> Optional[frozenset[tuple[Predicate, int]]]:
        return self._candidates.get(text)

    def seen(self, text: str) -> bool:
        return text in self._candidates

    def converged(self, text: str) -> bool:
        cands = self._candidates.get(text)
        return cands is not None and len(cands) == 1

    def transformation(self, text: str) -> tuple[Predicate, int]:
        if not self.converged(text):
            raise NotYetGroundedError(f"sentence {text!r} is not grounded yet")
        return next(iter(self._candidates[text]))

    def converged_count(self) -> int:
        return sum(1 for cands in self._candidates.values() if len(cands) == 1)

    def to_json(self) -> dict:
        return {
            text: sorted([p.text(), t] for p, t in cands)
            for text, cands in sorted(self._candidates.items())
        }


def induce(
    table: GroundingTable,
    example: tuple[Configuration, Union[Sentence, str], Configuration],
) -> GroundingTable:
    """Shrink a sentence's candidate set to the predicates that changed.

    The learner never sees the hidden transformation, only surface text aligned
    with a before/after configuration pair.
    """
    before, sentence, after = example
    text = sentence.text if isinstance(sentence, Sentence) else sentence
    if before == after:
        raise ValueError("induction example must involve a change")
    diff = frozenset(before.changed_predicates(after))
    current = table._candidates.get(text)
    shrunk = diff if current is None else current & diff
    if not shrunk:
        raise InconsistentDataError(
            f"no transformation is consistent with every example for {text!r}"
        )
    table._candidates[text] = shrunk
    return table


# --- expressions ---------------------------------------------------------


@dataclass(frozen=True)
class Leaf:
    text: str


@dataclass(frozen=True)
class And:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Or:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Not:
    child: "Expression"


Expression = Union[Leaf, And, Or, Not]


def expression_to_json(expr: Expression) -> dict:
    if isinstance(expr, Leaf):
        return {"op": "leaf", "text": expr.text}
    if isinstance(expr, And):
        return {"op": "and", "children": [expression_to_json(expr.left), expression_to_json(expr.right)]}
    if isinstance(expr, Or):
        return {"op": "or", "children": [expression_to_json(expr.left), expression_to_json(expr.right)]}
    if isinstance(expr, Not):
        return {"op": "not", "children": [expression_to_json(expr.child)]}
    raise ExpressionParseError(f"unknown expression node {expr!r}")


def parse_expression(data: object) -> Expression:
    if not isinstance(data, dict) or "op" not in data:
        raise ExpressionParseError(f"expression node must be an object with an op, got {data!r}")
    op = data["op"]
    if op == "leaf":
        text = data.get("text")
        if not isinstance(text, str):
            raise ExpressionParseError("leaf node needs a text field")
        return Leaf(text)
    children = data.get("children")
    if not isinstance(children, list):
        raise ExpressionParseError(f"{op} node needs a children list")
    if op in ("and", "or"):
        if len(children) != 2:
            raise ExpressionParseError(f"{op} takes exactly two children")
        left, right = (parse_expression(c) for c in children)
        return And(left, right) if op == "and" else Or(left, right)
    if op == "not":
        if len(children) != 1:
            raise ExpressionParseError("not takes exactly one child")
        return Not(parse_expression(children[0]))
    raise ExpressionParseError(f"unknown expression op {op!r}")


def expression_leaves(expr: Expression) -> tuple[str, ...]:
    if isinstance(expr, Leaf):
        return (expr.text,)
    if isinstance(expr, Not):
        return expression_leaves(expr.child)
    return expression_leaves(expr.left) + expression_leaves(expr.right)


def sample_expression(rng, inventory: Inventory, max_depth: int = 2) -> Expression:
    """A random logical function of sentences.

    A bare sentence is an instruction, not a function of instructions, so the
    root is always a connective: And/Or over subterms, where a subterm is a
    nested connective (up to max_depth levels, half the time) or a possibly
    negated sentence.  The whole function is itself negated 10% of the time.
    """
    texts = inventory.texts()

    def literal() -> Expression:
        leaf = Leaf(rng.choice(texts))
        return Not(leaf) if rng.random() < 0.25 else leaf

    def connective(depth: int) -> Expression:
        op = And if rng.random() < 0.5 else Or

        def subterm() -> Expression:
            if depth < max_depth and rng.random() < 0.5:
                return connective(depth + 1)
            return literal()

        return op(subterm(), subterm())

    expression = connective(1)
    return Not(expression) if rng.random() < 0.1 else expression


def ground_expression(
    expr: Expression,
    current: Configuration,
    discovered: Iterable[Configuration],
    source,
    require_change: bool = True,
) -> frozenset[Configuration]:
    """Evaluate an expression to its compatible goal set.

    and intersects, or unites, and not complements within the discovered set.
    `source` resolves leaf texts to transformations: an Inventory (the oracle)
    or a GroundingTable (raises until the sentence has converged).
    """
    universe = frozenset(discovered)
    if isinstance(expr, Leaf):
        predicate, target = source.transformation(expr.text)
        matches = {c for c in universe if c.value(predicate) == target}
        if require_change:
            matches.discard(current)
        return frozenset(matches)
    if isinstance(expr, And):
        return ground_expression(expr.left, current, universe, source, require_change) & \
            ground_expression(expr.right, current, universe, source, require_change)
    if isinstance(expr, Or):
        return ground_expression(expr.left, current, universe, source, require_change) | \
            ground_expression(expr.right, current, universe, source, require_change)
    if isinstance(expr, Not):
        return universe - ground_expression(expr.child, current, universe, source, require_change)
    raise ExpressionParseError(f"unknown expression node {expr!r}")


# --- goal selection and instruction following ------------------------------------


def select_goal(
    candidates: Iterable[Configuration],
    learner: LearnerState,
    graph: GoalGraph,
    competence: CompetenceModel,
) -> Configuration:
    """The easiest candidate: argmax estimated competence.

    Ties go to the shorter discovered-graph plan, then the lexicographically
    smallest bit string.  With every candidate unreachable the pick is the
    plain lexicographic minimum (a desperate but deterministic choice).
    """
    ordered = sorted(set(candidates))
    if not ordered:
        raise NoCompatibleGoalError("no compatible goal to select from")
    current = learner.current
    allowed = learner.discovered | {current}

    def plan_length(goal: Configuration) -> int:
        path = plan_within(graph, current, goal, allowed)
        return len(path) - 1 if path is not None else len(graph) + 1

    scored = [
        (-estimated_competence(learner, graph, goal, competence), plan_length(goal), goal)
        for goal in ordered
    ]
    scored.sort()
    if all(score[0] == 0.0 for score in scored):
        log.info("every candidate goal is unreachable; picking lexicographic minimum")
    return scored[0][2]


def follow_instruction(
    expr: Expression,
    learner: LearnerState,
    competence: CompetenceModel,
    rng,
    attempts: int = 5,
    max_moves: int = 8,
    source=None,
    require_change: bool = True,
) -> tuple[bool, tuple]:
    """Pursue an instruction with a try-again budget and no scene reset.

    Each attempt regrounds the expression from the current configuration,
    skips goals that already failed for this instruction, targets the easiest
    remaining candidate, and runs one episode.  An empty grounding costs an
    attempt.  Success ends the loop immediately.
    """
    if attempts < 1:
        raise ValueError(f"attempts must be >= 1, got {attempts}")
    graph = build_goal_graph(learner.n_blocks)
    resolver = source if source is not None else build_inventory(learner.n_blocks)
    failed: set[Configuration] = set()
    outcomes = []
    for _ in range(attempts):
        grounding = ground_expression(
            expr, learner.current, learner.discovered, resolver, require_change
        )
        candidates = grounding - failed
        if not candidates:
            continue  # a wasted attempt: nothing compatible right now
        goal = select_goal(candidates, learner, graph, competence)
        outcome = run_episode(learner, learner.scene, goal, competence, max_moves, rng)
        outcomes.append(outcome)
        if outcome.success:
            return True, tuple(outcomes)
        failed.add(goal)
    return False, tuple(outcomes)
