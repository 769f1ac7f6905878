"""Goal graph over valid configurations, with one-move transitions as edges.

Nodes are every realizable configuration of the world; an undirected edge
joins two configurations exactly when one legal move of a single block maps a
scene of one onto a scene of the other.  Paths through this graph decompose a
distant goal into a chain of one-move subgoals.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable, Iterator

from blocktutor.semantics import (
    Configuration,
    apply_move,
    check_world_size,
    enumerate_scenes,
    extract_config,
    legal_moves,
)


class UnknownGoalError(ValueError):
    """Configuration is not a node of the graph (invalid or wrong world size)."""


class GoalGraph:
    """Immutable adjacency structure over the valid configurations of one world."""

    def __init__(self, n_blocks: int):
        check_world_size(n_blocks)
        self.n_blocks = n_blocks
        adjacency: dict[Configuration, set[Configuration]] = {}
        for scene in enumerate_scenes(n_blocks):
            config = extract_config(scene)
            nbrs = adjacency.setdefault(config, set())
            for move in legal_moves(scene):
                nbrs.add(extract_config(apply_move(scene, move)))
        # moves are reversible, so adjacency must come out symmetric
        for u, nbrs in adjacency.items():
            for v in nbrs:
                assert u in adjacency[v], f"asymmetric edge {u} -> {v}"
        self.nodes: tuple[Configuration, ...] = tuple(sorted(adjacency))
        self._adjacency = {u: tuple(sorted(nbrs)) for u, nbrs in adjacency.items()}
        self._distance_cache: dict[Configuration, dict[Configuration, int]] = {}

    def __contains__(self, config: Configuration) -> bool:
        return config in self._adjacency

    def __len__(self) -> int:
        return len(self.nodes)

    def neighbors(self, config: Configuration) -> tuple[Configuration, ...]:
        try:
            return self._adjacency[config]
        except KeyError:
            raise UnknownGoalError(f"{config} is not a valid configuration of this world") from None

    def edges(self) -> Iterator[tuple[Configuration, Configuration]]:
        for u in self.nodes:
            for v in self._adjacency[u]:
                if u < v:
                    yield (u, v)

    def is_connected(self) -> bool:
        seen = {self.nodes[0]}
        frontier = deque(seen)
        while frontier:
            u = frontier.popleft()
            for v in self._adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
        return len(seen) == len(self.nodes)

    def _distances_to(self, goal: Configuration) -> dict[Configuration, int]:
        """BFS distance of every node to the goal node; memoized per goal."""
        cached = self._distance_cache.get(goal)
        if cached is not None:
            return cached
        if goal not in self._adjacency:
            raise UnknownGoalError(f"{goal} is not a valid configuration of this world")
        dist = {goal: 0}
        frontier = deque([goal])
        while frontier:
            u = frontier.popleft()
            for v in self._adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    frontier.append(v)
        self._distance_cache[goal] = dist
        return dist

    def distance(self, start: Configuration, goal: Configuration) -> int:
        if start not in self._adjacency:
            raise UnknownGoalError(f"{start} is not a valid configuration of this world")
        return self._distances_to(goal)[start]

    def shortest_path(self, start: Configuration, goal: Configuration) -> tuple[Configuration, ...]:
        """Deterministic shortest path from start to goal, both ends included.

        Ties between equally short continuations go to the lexicographically
        smallest next configuration.
        """
        dist = self._distances_to(goal)
        if start not in self._adjacency:
            raise UnknownGoalError(f"{start} is not a valid configuration of this world")
        path = [start]
        current = start
        while current != goal:
            current = min(v for v in self._adjacency[current] if dist[v] == dist[current] - 1)
            path.append(current)
        return tuple(path)

    def decompose(self, current: Configuration, target: Configuration) -> tuple[Configuration, ...]:
        """Chain of one-move subgoals from current to target, target included.

        Empty when current already equals target.
        """
        return self.shortest_path(current, target)[1:]

    def frontier_pairs(
        self, discovered: Iterable[Configuration]
    ) -> tuple[tuple[Configuration, Configuration], ...]:
        """All (frontier, beyond) pairs: a discovered node next to an undiscovered one.

        Sorted deterministically; empty once every node is discovered.
        """
        known = set(discovered)
        unknown = {d for d in known if d not in self._adjacency}
        if unknown:
            raise UnknownGoalError(f"{min(unknown)} is not a valid configuration of this world")
        pairs = [
            (f, b)
            for f in sorted(known)
            for b in self._adjacency[f]
            if b not in known
        ]
        return tuple(pairs)


@lru_cache(maxsize=None)
def build_goal_graph(n_blocks: int) -> GoalGraph:
    """The goal graph of the n-block world (one shared instance per size)."""
    return GoalGraph(n_blocks)
