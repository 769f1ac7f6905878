"""Semantic block world: spatial predicates, configurations, scenes and one-block moves.

A world of ``n`` colored blocks is described by two innate binary predicates over
block pairs: ``close`` (proximity, unordered) and ``above`` (vertical order,
ordered).  A *configuration* is the fixed-order bit vector of all predicate
values; a *scene* is a physical arrangement (singles, stacks, pyramids grouped
into proximity clusters) that realizes a configuration.  Valid configurations
and canonical scenes are in bijection, which keeps decoding exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence, Union

MIN_BLOCKS = 2
MAX_BLOCKS = 5

COLOR_NAMES = ("red", "green", "blue", "yellow", "purple")


class InvalidWorldError(ValueError):
    """World size does not admit a predicate space (fewer than 2 blocks)."""


class UnsupportedWorldSizeError(ValueError):
    """World size outside the supported 2..5 block range."""


class DimensionError(ValueError):
    """Bit vector length does not match the world's predicate count."""


class InvariantViolationError(ValueError):
    """A scene or configuration violates a structural invariant."""


class UnrealizableConfigurationError(InvariantViolationError):
    """No scene realizes the given configuration."""


class IllegalMoveError(ValueError):
    """A move violates one of its preconditions; the message names it."""


def predicate_count(n_blocks: int) -> int:
    """Number of predicates for ``n_blocks``: C(n,2) close + n(n-1) above = 3*C(n,2)."""
    if n_blocks < MIN_BLOCKS:
        raise InvalidWorldError(f"a world needs at least {MIN_BLOCKS} blocks, got {n_blocks}")
    return 3 * comb(n_blocks, 2)


def check_world_size(n_blocks: int) -> int:
    if not MIN_BLOCKS <= n_blocks <= MAX_BLOCKS:
        raise UnsupportedWorldSizeError(
            f"supported world sizes are {MIN_BLOCKS}..{MAX_BLOCKS} blocks, got {n_blocks}"
        )
    return n_blocks


def n_blocks_for_length(n_bits: int) -> int:
    """Inverse of predicate_count over the supported range."""
    for n in range(MIN_BLOCKS, MAX_BLOCKS + 1):
        if predicate_count(n) == n_bits:
            return n
    raise DimensionError(f"no supported world has {n_bits} predicates")


def block_name(block: int) -> str:
    return COLOR_NAMES[block]


def block_index(name: str) -> int:
    try:
        return COLOR_NAMES.index(name)
    except ValueError:
        raise InvariantViolationError(f"unknown block name {name!r}") from None


# --- predicate indexing -----------------------------------------------------
#
# Canonical order: close pairs (i<j) lexicographic, then above ordered pairs
# (a!=b) lexicographic.  This order is the wire format for bit strings.


@dataclass(frozen=True, order=True)
class Predicate:
    """One predicate slot: close(a,b) with a<b, or above(a,b) meaning a is above b."""

    kind: str  # "close" | "above"
    a: int
    b: int

    def __post_init__(self):
        if self.kind not in ("close", "above"):
            raise InvariantViolationError(f"unknown predicate kind {self.kind!r}")
        if self.kind == "close" and not self.a < self.b:
            raise InvariantViolationError("close predicates take an unordered pair a<b")
        if self.kind == "above" and self.a == self.b:
            raise InvariantViolationError("above predicates need two distinct blocks")

    def text(self) -> str:
        return f"{self.kind}({block_name(self.a)},{block_name(self.b)})"

    @classmethod
    def parse(cls, text: str) -> "Predicate":
        kind, _, rest = text.partition("(")
        names = rest.rstrip(")").split(",")
        if len(names) != 2:
            raise InvariantViolationError(f"cannot parse predicate {text!r}")
        return cls(kind.strip(), block_index(names[0].strip()), block_index(names[1].strip()))


@lru_cache(maxsize=None)
def close_pairs(n_blocks: int) -> tuple[tuple[int, int], ...]:
    return tuple(itertools.combinations(range(n_blocks), 2))


@lru_cache(maxsize=None)
def above_pairs(n_blocks: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, b) for a in range(n_blocks) for b in range(n_blocks) if a != b)


@lru_cache(maxsize=None)
def predicates(n_blocks: int) -> tuple[Predicate, ...]:
    """All predicates of an n-block world in canonical (wire) order."""
    predicate_count(n_blocks)
    close = tuple(Predicate("close", a, b) for a, b in close_pairs(n_blocks))
    above = tuple(Predicate("above", a, b) for a, b in above_pairs(n_blocks))
    return close + above


@lru_cache(maxsize=None)
def _predicate_index_map(n_blocks: int) -> dict[Predicate, int]:
    return {p: i for i, p in enumerate(predicates(n_blocks))}


def predicate_index(pred: Predicate, n_blocks: int) -> int:
    return _predicate_index_map(n_blocks)[pred]


def predicate_at(index: int, n_blocks: int) -> Predicate:
    return predicates(n_blocks)[index]


# --- configurations ---------------------------------------------------------


@dataclass(frozen=True, order=True)
class Configuration:
    """Binary vector of all predicate values in canonical order."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise InvariantViolationError("configuration bits must be 0 or 1")
        n_blocks_for_length(len(self.bits))

    @property
    def n_blocks(self) -> int:
        return n_blocks_for_length(len(self.bits))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Configuration":
        return cls(tuple(int(b) for b in bits))

    @classmethod
    def from_string(cls, text: str) -> "Configuration":
        if not set(text) <= {"0", "1"}:
            raise InvariantViolationError(f"bit string may only contain 0/1, got {text!r}")
        return cls(tuple(int(c) for c in text))

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.bits)

    def value(self, pred: Predicate) -> int:
        return self.bits[predicate_index(pred, self.n_blocks)]

    def close(self, a: int, b: int) -> bool:
        if a > b:
            a, b = b, a
        return bool(self.value(Predicate("close", a, b)))

    def above(self, a: int, b: int) -> bool:
        return bool(self.value(Predicate("above", a, b)))

    def changed_predicates(self, other: "Configuration") -> tuple[tuple[Predicate, int], ...]:
        """(predicate, new value) for every bit that differs from self to other."""
        if len(self.bits) != len(other.bits):
            raise DimensionError("configurations live in different worlds")
        preds = predicates(self.n_blocks)
        return tuple(
            (preds[i], other.bits[i])
            for i in range(len(self.bits))
            if self.bits[i] != other.bits[i]
        )

    def __str__(self) -> str:
        return self.bitstring()


def zero_configuration(n_blocks: int) -> Configuration:
    """All predicates false: every block alone and far from the others."""
    return Configuration(tuple([0] * predicate_count(n_blocks)))


# --- scenes -----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Single:
    block: int


@dataclass(frozen=True, order=True)
class Stack:
    """Blocks listed bottom to top; length 2..n."""

    blocks: tuple[int, ...]


@dataclass(frozen=True, order=True)
class Pyramid:
    """One top block resting on a pair of side-by-side base blocks."""

    top: int
    base: tuple[int, int]


Structure = Union[Single, Stack, Pyramid]


def structure_blocks(structure: Structure) -> tuple[int, ...]:
    if isinstance(structure, Single):
        return (structure.block,)
    if isinstance(structure, Stack):
        return structure.blocks
    return (structure.top,) + structure.base


def structure_heights(structure: Structure) -> dict[int, int]:
    if isinstance(structure, Single):
        return {structure.block: 0}
    if isinstance(structure, Stack):
        return {b: h for h, b in enumerate(structure.blocks)}
    return {structure.base[0]: 0, structure.base[1]: 0, structure.top: 1}


def clear_block(structure: Structure) -> int:
    """The one block of the structure with nothing resting on it."""
    if isinstance(structure, Single):
        return structure.block
    if isinstance(structure, Stack):
        return structure.blocks[-1]
    return structure.top


def _structure_key(structure: Structure) -> tuple:
    rank = {Single: 0, Stack: 1, Pyramid: 2}[type(structure)]
    return (rank, structure_blocks(structure))


def _validate_structure(structure: Structure, n_blocks: int) -> None:
    blocks = structure_blocks(structure)
    if len(set(blocks)) != len(blocks):
        raise InvariantViolationError(f"structure repeats a block: {structure}")
    if any(not 0 <= b < n_blocks for b in blocks):
        raise InvariantViolationError(f"structure references a block outside the world: {structure}")
    if isinstance(structure, Stack) and not 2 <= len(structure.blocks) <= n_blocks:
        raise InvariantViolationError(f"stacks hold 2..{n_blocks} blocks: {structure}")
    if isinstance(structure, Pyramid) and structure.base[0] >= structure.base[1]:
        raise InvariantViolationError(f"pyramid base pair must be sorted: {structure}")


@dataclass(frozen=True)
class Scene:
    """Proximity clusters of structures; every block appears exactly once.

    Scenes are stored in a canonical order (structures sorted within a
    cluster, clusters sorted by their first structure) so that equal
    arrangements compare and hash equal.  Ordering follows the extracted
    configuration, which the scene determines uniquely.
    """

    clusters: tuple[tuple[Structure, ...], ...]

    def __lt__(self, other: "Scene") -> bool:
        return extract_config(self).bits < extract_config(other).bits

    def __post_init__(self):
        seen: set[int] = set()
        for cluster in self.clusters:
            if not cluster:
                raise InvariantViolationError("empty proximity cluster")
            for structure in cluster:
                blocks = structure_blocks(structure)
                dup = seen.intersection(blocks)
                if dup:
                    raise InvariantViolationError(
                        f"block {block_name(min(dup))} appears in more than one structure"
                    )
                seen.update(blocks)
        n = len(seen)
        if seen != set(range(n)):
            raise InvariantViolationError("block indices must be dense starting at 0")
        check_world_size(n)
        for cluster in self.clusters:
            for structure in cluster:
                _validate_structure(structure, n)

    @classmethod
    def of(cls, clusters: Iterable[Iterable[Structure]]) -> "Scene":
        """Build a scene, canonicalizing structure and cluster order."""
        canon = tuple(
            sorted(
                (tuple(sorted(cluster, key=_structure_key)) for cluster in clusters),
                key=lambda c: _structure_key(c[0]) if c else (),
            )
        )
        return cls(canon)

    @classmethod
    def scattered(cls, n_blocks: int) -> "Scene":
        """Every block a single in its own cluster (the all-zero configuration)."""
        check_world_size(n_blocks)
        return cls.of([[Single(b)] for b in range(n_blocks)])

    @property
    def structures(self) -> tuple[Structure, ...]:
        return tuple(s for cluster in self.clusters for s in cluster)

    @property
    def n_blocks(self) -> int:
        return sum(len(structure_blocks(s)) for s in self.structures)

    def cluster_of_block(self, block: int) -> int:
        for ci, cluster in enumerate(self.clusters):
            for structure in cluster:
                if block in structure_blocks(structure):
                    return ci
        raise InvariantViolationError(f"block {block} not in scene")

    def to_json(self) -> dict:
        structures = []
        clusters: list[list[int]] = []
        for cluster in self.clusters:
            indices = []
            for structure in cluster:
                indices.append(len(structures))
                structures.append(_structure_to_json(structure))
            clusters.append(indices)
        return {"structures": structures, "clusters": clusters}

    @classmethod
    def from_json(cls, data: dict) -> "Scene":
        try:
            structures = [_structure_from_json(s) for s in data["structures"]]
            clusters = [[structures[i] for i in group] for group in data["clusters"]]
        except (KeyError, TypeError, IndexError) as exc:
            raise InvariantViolationError(f"malformed scene JSON: {exc}") from exc
        used = sorted(i for group in data["clusters"] for i in group)
        if used != list(range(len(structures))):
            raise InvariantViolationError("clusters must partition the structure list")
        return cls.of(clusters)


def _structure_to_json(structure: Structure) -> dict:
    if isinstance(structure, Single):
        return {"kind": "single", "block": block_name(structure.block)}
    if isinstance(structure, Stack):
        return {"kind": "stack", "blocks": [block_name(b) for b in structure.blocks]}
    return {
        "kind": "pyramid",
        "top": block_name(structure.top),
        "base": [block_name(b) for b in structure.base],
    }


def _structure_from_json(data: dict) -> Structure:
    kind = data.get("kind")
    if kind == "single":
        return Single(block_index(data["block"]))
    if kind == "stack":
        return Stack(tuple(block_index(b) for b in data["blocks"]))
    if kind == "pyramid":
        base = sorted(block_index(b) for b in data["base"])
        return Pyramid(block_index(data["top"]), (base[0], base[1]))
    raise InvariantViolationError(f"unknown structure kind {kind!r}")


# --- scene -> configuration -------------------------------------------------


@lru_cache(maxsize=None)
def extract_config(scene: Scene) -> Configuration:
    """Read off all predicate values from a scene.

    close(a,b) holds iff a and b sit in the same proximity cluster; above(a,b)
    holds iff a is strictly higher than b within the same structure, so a stack
    of three sets all three of its above bits (the relation is transitive).
    """
    n = scene.n_blocks
    cluster_of: dict[int, int] = {}
    structure_of: dict[int, tuple[int, int]] = {}
    heights: dict[int, int] = {}
    for ci, cluster in enumerate(scene.clusters):
        for si, structure in enumerate(cluster):
            for b, h in structure_heights(structure).items():
                cluster_of[b] = ci
                structure_of[b] = (ci, si)
                heights[b] = h
    bits = []
    for a, b in close_pairs(n):
        bits.append(1 if cluster_of[a] == cluster_of[b] else 0)
    for a, b in above_pairs(n):
        same = structure_of[a] == structure_of[b]
        bits.append(1 if same and heights[a] > heights[b] else 0)
    return Configuration(tuple(bits))


# --- configuration -> scene (decode / validity) ------------------------------


def realize_config(config: Configuration) -> Scene:
    """Decode a configuration into the unique canonical scene realizing it.

    Raises UnrealizableConfigurationError when no scene exists.  Rejection
    checks, in order: above implies close; above antisymmetric; above
    transitively closed; close is a disjoint union of cliques; every
    above-component is a single block, a totally ordered stack, or a
    three-block pyramid pattern.
    """
    n = config.n_blocks
    close = {(a, b): config.close(a, b) for a, b in close_pairs(n)}
    above = {(a, b): config.above(a, b) for a, b in above_pairs(n)}

    for a, b in above_pairs(n):
        if above[(a, b)]:
            if not close[(min(a, b), max(a, b))]:
                raise UnrealizableConfigurationError(
                    f"above({block_name(a)},{block_name(b)}) without close"
                )
            if above[(b, a)]:
                raise UnrealizableConfigurationError(
                    f"above({block_name(a)},{block_name(b)}) in both directions"
                )
    for a, b in above_pairs(n):
        for c in range(n):
            if c not in (a, b) and above[(a, b)] and above[(b, c)] and not above[(a, c)]:
                raise UnrealizableConfigurationError(
                    "above relation is not transitively closed"
                )

    # close components must be cliques
    comp = list(range(n))

    def find(x: int) -> int:
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for (a, b), v in close.items():
        if v:
            comp[find(a)] = find(b)
    for a, b in close_pairs(n):
        if (find(a) == find(b)) != bool(close[(a, b)]):
            raise UnrealizableConfigurationError("close relation is not a union of cliques")

    # above components -> structures
    neighbors: dict[int, set[int]] = {b: set() for b in range(n)}
    for a, b in above_pairs(n):
        if above[(a, b)]:
            neighbors[a].add(b)
            neighbors[b].add(a)
    unvisited = set(range(n))
    structures: list[Structure] = []
    while unvisited:
        start = min(unvisited)
        component = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for y in neighbors[x]:
                if y not in component:
                    component.add(y)
                    frontier.append(y)
        unvisited -= component
        structures.append(_component_structure(sorted(component), above))

    clusters: dict[int, list[Structure]] = {}
    for structure in structures:
        roots = {find(b) for b in structure_blocks(structure)}
        if len(roots) != 1:
            raise UnrealizableConfigurationError("structure spans proximity clusters")
        clusters.setdefault(roots.pop(), []).append(structure)
    scene = Scene.of(clusters.values())
    if extract_config(scene) != config:
        raise UnrealizableConfigurationError("decoded scene does not reproduce the configuration")
    return scene


def _component_structure(blocks: Sequence[int], above: dict[tuple[int, int], int]) -> Structure:
    if len(blocks) == 1:
        return Single(blocks[0])
    edges = {(a, b) for a in blocks for b in blocks if a != b and above[(a, b)]}
    k = len(blocks)
    if len(edges) == k * (k - 1) // 2:
        # every pair comparable: a totally ordered stack, bottom has no block below it
        order = sorted(blocks, key=lambda x: sum(1 for y in blocks if (x, y) in edges))
        if all((order[j], order[i]) in edges for i in range(k) for j in range(i + 1, k)):
            return Stack(tuple(order))
    if k == 3:
        tops = [t for t in blocks if all((t, b) in edges for b in blocks if b != t)]
        if len(tops) == 1 and len(edges) == 2:
            base = tuple(sorted(b for b in blocks if b != tops[0]))
            return Pyramid(tops[0], (base[0], base[1]))
    raise UnrealizableConfigurationError(
        "above pattern is neither a stack order nor a pyramid"
    )


def is_valid(config: Configuration, n_blocks: int | None = None) -> bool:
    """True iff some scene realizes the configuration."""
    if n_blocks is not None and len(config.bits) != predicate_count(n_blocks):
        raise DimensionError(
            f"expected {predicate_count(n_blocks)} bits for {n_blocks} blocks, got {len(config.bits)}"
        )
    try:
        realize_config(config)
    except UnrealizableConfigurationError:
        return False
    return True


# --- enumeration ------------------------------------------------------------


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All partitions of items into non-empty unordered groups."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1 :]
        yield [[first]] + partition


def _group_arrangements(blocks: Sequence[int]) -> list[Structure]:
    if len(blocks) == 1:
        return [Single(blocks[0])]
    arrangements: list[Structure] = [Stack(p) for p in itertools.permutations(blocks)]
    if len(blocks) == 3:
        for top in blocks:
            base = tuple(sorted(b for b in blocks if b != top))
            arrangements.append(Pyramid(top, (base[0], base[1])))
    return arrangements


def enumerate_scenes(n_blocks: int) -> Iterator[Scene]:
    """Every canonical scene of the n-block world, without repetition."""
    check_world_size(n_blocks)
    for block_partition in set_partitions(tuple(range(n_blocks))):
        options = [_group_arrangements(tuple(group)) for group in block_partition]
        for structures in itertools.product(*options):
            for cluster_partition in set_partitions(tuple(structures)):
                yield Scene.of(cluster_partition)


@lru_cache(maxsize=None)
def enumerate_valid_configs(n_blocks: int) -> frozenset[Configuration]:
    """All configurations realizable by at least one scene."""
    check_world_size(n_blocks)
    return frozenset(extract_config(scene) for scene in enumerate_scenes(n_blocks))


# --- moves ------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class AloneFar:
    """Put the block down as a single in a fresh cluster of its own."""


@dataclass(frozen=True, order=True)
class JoinCluster:
    """Put the block down as a single inside an existing cluster (by index)."""

    cluster: int


@dataclass(frozen=True, order=True)
class OnTop:
    """Place the block on top of another clear block (single or stack top)."""

    target: int


@dataclass(frozen=True, order=True)
class Bridge:
    """Place the block across two clear singles of one cluster, forming a pyramid."""

    targets: tuple[int, int]


Placement = Union[AloneFar, JoinCluster, OnTop, Bridge]


@dataclass(frozen=True)
class Move:
    block: int
    placement: Placement

    def __lt__(self, other: "Move") -> bool:
        return _placement_sort_key(self) < _placement_sort_key(other)

    def to_json(self) -> dict:
        p = self.placement
        if isinstance(p, AloneFar):
            placement = {"kind": "alone_far"}
        elif isinstance(p, JoinCluster):
            placement = {"kind": "join_cluster", "cluster": p.cluster}
        elif isinstance(p, OnTop):
            placement = {"kind": "on_top", "target": block_name(p.target)}
        else:
            placement = {"kind": "bridge", "targets": [block_name(b) for b in p.targets]}
        return {"block": block_name(self.block), "placement": placement}


def _placement_sort_key(move: Move) -> tuple:
    p = move.placement
    rank = {AloneFar: 0, JoinCluster: 1, OnTop: 2, Bridge: 3}[type(p)]
    args = () if isinstance(p, AloneFar) else (
        (p.cluster,) if isinstance(p, JoinCluster) else ((p.target,) if isinstance(p, OnTop) else p.targets)
    )
    return (move.block, rank, args)


@lru_cache(maxsize=None)
def legal_moves(scene: Scene) -> tuple[Move, ...]:
    """Every move of one clear block to a placement yielding a new well-formed scene.

    No-op placements that reproduce the scene are excluded: AloneFar for a
    block already alone in its own cluster, JoinCluster for a single already
    in that cluster, OnTop for a block already resting on the target.
    """
    moves: list[Move] = []
    clear_info: dict[int, tuple[int, Structure]] = {}
    for ci, cluster in enumerate(scene.clusters):
        for structure in cluster:
            clear_info[clear_block(structure)] = (ci, structure)

    for b in sorted(clear_info):
        ci, structure = clear_info[b]
        lone_single = isinstance(structure, Single) and scene.clusters[ci] == (structure,)
        if not lone_single:
            moves.append(Move(b, AloneFar()))
        for target_ci in range(len(scene.clusters)):
            if isinstance(structure, Single) and target_ci == ci:
                continue  # already a single there
            moves.append(Move(b, JoinCluster(target_ci)))
        for t, (_, t_structure) in clear_info.items():
            if t == b or isinstance(t_structure, Pyramid):
                continue  # cannot stack onto a pyramid top
            if isinstance(structure, Stack) and len(structure.blocks) >= 2 and structure.blocks[-2] == t:
                continue  # already directly on the target
            moves.append(Move(b, OnTop(t)))
        singles = [
            (t, t_ci)
            for t, (t_ci, t_structure) in clear_info.items()
            if isinstance(t_structure, Single) and t != b
        ]
        for (t1, c1), (t2, c2) in itertools.combinations(sorted(singles), 2):
            if c1 == c2:
                moves.append(Move(b, Bridge((t1, t2))))
    return tuple(sorted(moves, key=_placement_sort_key))


def apply_move(scene: Scene, move: Move) -> Scene:
    """Apply a legal move; raises IllegalMoveError naming any violated precondition."""
    clusters: list[list[Structure]] = [list(c) for c in scene.clusters]
    b = move.block

    source = None
    for ci, cluster in enumerate(scene.clusters):
        for structure in cluster:
            if b in structure_blocks(structure):
                source = (ci, structure)
    if source is None:
        raise IllegalMoveError(f"block {block_name(b)} is not in the scene")
    ci, structure = source
    if clear_block(structure) != b:
        raise IllegalMoveError(f"block {block_name(b)} is not clear")

    clear_targets = {clear_block(s): s for c in scene.clusters for s in c}

    # detach b from its structure
    clusters[ci].remove(structure)
    if isinstance(structure, Stack):
        remainder = structure.blocks[:-1]
        clusters[ci].append(Stack(remainder) if len(remainder) > 1 else Single(remainder[0]))
    elif isinstance(structure, Pyramid):
        clusters[ci].extend([Single(structure.base[0]), Single(structure.base[1])])

    p = move.placement
    if isinstance(p, AloneFar):
        if isinstance(structure, Single) and scene.clusters[ci] == (structure,):
            raise IllegalMoveError(f"block {block_name(b)} is already alone in its own cluster")
        clusters.append([Single(b)])
    elif isinstance(p, JoinCluster):
        if not 0 <= p.cluster < len(scene.clusters):
            raise IllegalMoveError(f"no cluster {p.cluster} in the scene")
        if isinstance(structure, Single) and p.cluster == ci:
            raise IllegalMoveError(f"block {block_name(b)} is already a single in that cluster")
        clusters[p.cluster].append(Single(b))
    elif isinstance(p, OnTop):
        t = p.target
        t_structure = clear_targets.get(t)
        if t == b:
            raise IllegalMoveError("a block cannot be placed on itself")
        if t_structure is None:
            raise IllegalMoveError(f"target block {block_name(t)} is not clear")
        if isinstance(t_structure, Pyramid):
            raise IllegalMoveError("cannot stack onto a pyramid top")
        if isinstance(structure, Stack) and len(structure.blocks) >= 2 and structure.blocks[-2] == t:
            raise IllegalMoveError(f"block {block_name(b)} is already on {block_name(t)}")
        t_ci = scene.cluster_of_block(t)
        clusters[t_ci].remove(t_structure)
        base = t_structure.blocks if isinstance(t_structure, Stack) else (t,)
        clusters[t_ci].append(Stack(base + (b,)))
    elif isinstance(p, Bridge):
        t1, t2 = p.targets
        if len({t1, t2, b}) != 3:
            raise IllegalMoveError("bridge targets must be two distinct other blocks")
        s1, s2 = clear_targets.get(t1), clear_targets.get(t2)
        if not isinstance(s1, Single) or not isinstance(s2, Single):
            raise IllegalMoveError("bridge targets must both be clear single blocks")
        c1, c2 = scene.cluster_of_block(t1), scene.cluster_of_block(t2)
        if c1 != c2:
            raise IllegalMoveError("bridge targets must share a proximity cluster")
        clusters[c1].remove(s1)
        clusters[c1].remove(s2)
        lo, hi = min(t1, t2), max(t1, t2)
        clusters[c1].append(Pyramid(b, (lo, hi)))
    else:
        raise IllegalMoveError(f"unknown placement {p!r}")

    result = Scene.of(c for c in clusters if c)
    if result == scene:
        raise IllegalMoveError("move reproduces the same scene")
    return result
