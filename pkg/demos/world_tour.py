"""
A tour of the three-block world
===============================

Enumerate every meaning the world can express, check that the scene
grammar and the predicate decoder agree on what is sayable, and walk
the goal graph that connects the meanings by single moves.
"""

import itertools

from blocktutor.goal_graph import build_goal_graph
from blocktutor.semantics import (
    Configuration,
    enumerate_valid_configs,
    is_valid,
    predicate_count,
    realize_config,
    zero_configuration,
)

# Three blocks give three close() pairs and six ordered above() pairs,
# so a configuration is a 9-bit vector.  Most bit patterns describe
# physically impossible arrangements.
n_bits = predicate_count(3)
print(f"predicates at n=3: {n_bits}")

grammar_side = enumerate_valid_configs(3)
print(f"configurations realizable by the scene grammar: {len(grammar_side)}")

# The decoder walks the opposite direction: given raw bits, rebuild the
# scene or reject.  Both directions must carve out the same set.
decoder_side = {
    config
    for config in (
        Configuration(bits) for bits in itertools.product((0, 1), repeat=n_bits)
    )
    if is_valid(config)
}
print(f"configurations accepted by the decoder:         {len(decoder_side)}")
print(f"the two enumerations agree: {grammar_side == decoder_side}")

# Every valid configuration decodes to a canonical scene.
for config in sorted(grammar_side)[:5]:
    print(f"  {config.bitstring()} -> {realize_config(config)}")
print("  ...")

# Single pick-and-place moves connect the configurations into one graph.
graph = build_goal_graph(3)
print(f"\ngoal graph: {len(graph.nodes)} nodes, {len(list(graph.edges()))} edges")
print(f"connected: {graph.is_connected()}")

# Any meaning is a short walk from the scattered start.
start = zero_configuration(3)
farthest = max(graph.nodes, key=lambda node: len(graph.shortest_path(start, node)))
path = graph.shortest_path(start, farthest)
print(f"longest shortest path from scatter ({len(path) - 1} moves):")
for config in path:
    print(f"  {config.bitstring()}  {realize_config(config)}")
