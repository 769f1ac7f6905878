"""
Learning what sentences mean from narrated moves
================================================

The learner never sees a sentence's hidden (predicate, target) pairing.
It hears surface text aligned with before/after configurations and
intersects candidate meanings until one survives.
"""

import random

from blocktutor.language import (
    And,
    GroundingTable,
    Leaf,
    Not,
    build_inventory,
    ground_expression,
    induce,
    oracle_ground,
    parse_expression,
)
from blocktutor.semantics import enumerate_valid_configs
from blocktutor.tutor import describe

inventory = build_inventory(3)
nodes = sorted(enumerate_valid_configs(3))
rng = random.Random(11)

# Stream narrated transitions: the tutor picks a changed predicate and a
# sentence naming it, the learner shrinks that sentence's candidate set.
table = GroundingTable()
for step in range(1, 2001):
    before, after = rng.sample(nodes, 2)
    sentence = describe(before, after, inventory, rng)
    if sentence is not None:
        induce(table, (before, sentence, after))
    if step % 400 == 0:
        print(f"after {step:4d} narrated moves: {table.converged_count():3d}/102 grounded")

# A converged sentence recovers the oracle's transformation exactly.
sample = next(s for s in inventory if table.converged(s.text))
print(f"\n{sample.text!r}")
print(f"  induced meaning: {table.transformation(sample.text)}")
print(f"  oracle meaning:  {(sample.predicate, sample.target)}")

# Grounding an expression with the induced table matches the oracle.
current = nodes[0]
universe = frozenset(nodes)
induced = ground_expression(Leaf(sample.text), current, universe, table)
oracle = oracle_ground(sample, current, universe)
print(f"  grounds to {len(induced)} goals either way: {induced == oracle}")

# Sentences compose: and intersects, or unites, not complements within
# the discovered set.  Expressions also arrive as wire JSON.
# "red close to green, but not stacked on it": side-by-side placements.
close_text = sample.text
above_text = next(s.text for s in inventory if s.predicate.kind == "above")
expr = parse_expression(
    {
        "op": "and",
        "children": [
            {"op": "leaf", "text": close_text},
            {"op": "not", "children": [{"op": "leaf", "text": above_text}]},
        ],
    }
)
goals = ground_expression(expr, current, universe, inventory)
print(f"\n{close_text!r} AND NOT {above_text!r}")
print(f"  compatible goals: {len(goals)} of {len(universe)}")

left = ground_expression(Leaf(close_text), current, universe, inventory)
right = ground_expression(Not(Leaf(above_text)), current, universe, inventory)
print(f"  equals intersection of parts: {goals == left & right}")
assert goals == ground_expression(And(Leaf(close_text), Not(Leaf(above_text))), current, universe, inventory)
