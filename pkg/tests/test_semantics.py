"""Oracle and property tests for the block-world semantics layer."""

from __future__ import annotations

import random

import pytest

from blocktutor.semantics import (
    AloneFar,
    Bridge,
    Configuration,
    DimensionError,
    IllegalMoveError,
    InvalidWorldError,
    JoinCluster,
    Move,
    OnTop,
    Pyramid,
    Scene,
    Single,
    Stack,
    UnsupportedWorldSizeError,
    apply_move,
    enumerate_scenes,
    enumerate_valid_configs,
    extract_config,
    is_valid,
    legal_moves,
    predicate_at,
    predicate_count,
    predicates,
    realize_config,
    zero_configuration,
)

# red=0 green=1 blue=2 yellow=3 purple=4


def test_predicate_count():
    # C(n,2) close + n(n-1) above = 3*C(n,2)
    assert predicate_count(2) == 3
    assert predicate_count(3) == 9
    assert predicate_count(4) == 18
    assert predicate_count(5) == 30
    with pytest.raises(InvalidWorldError):
        predicate_count(1)


def test_predicate_order_n3():
    # close pairs lexicographic, then above ordered pairs lexicographic
    texts = [p.text() for p in predicates(3)]
    assert texts == [
        "close(red,green)",
        "close(red,blue)",
        "close(green,blue)",
        "above(red,green)",
        "above(red,blue)",
        "above(green,red)",
        "above(green,blue)",
        "above(blue,red)",
        "above(blue,green)",
    ]
    assert predicate_at(3, 3).text() == "above(red,green)"


def test_extract_config_oracles():
    # red stacked on green, blue far away
    scene = Scene.of([[Stack((1, 0))], [Single(2)]])
    assert extract_config(scene).bitstring() == "100100000"

    # tower red/green/blue top to bottom
    scene = Scene.of([[Stack((2, 1, 0))]])
    assert extract_config(scene).bitstring() == "111110100"

    # pyramid: red resting on green and blue
    scene = Scene.of([[Pyramid(0, (1, 2))]])
    assert extract_config(scene).bitstring() == "111110000"


def test_zero_configuration_is_scattered():
    for n in range(2, 6):
        scene = Scene.scattered(n)
        assert extract_config(scene) == zero_configuration(n)
        assert realize_config(zero_configuration(n)) == scene


# Valid configuration counts, derived combinatorially.  Scenes decompose as a
# block partition, an arrangement per group (1 single / k! stacks, +3 pyramids
# when k=3), and a set partition of the structures into clusters:
#   n=2: Bell(2) + 2 = 4
#   n=3: Bell(3) + 3*2*Bell(2) + (6+3) = 5 + 12 + 9 = 26
#   n=4: 15 + 6*2*5 + 3*4*2 + 4*9*2 + 24 = 195
#   n=5: 52 + 300 + 300 + 450 + 360 + 240 + 120 = 1822
EXPECTED_COUNTS = {2: 4, 3: 26, 4: 195, 5: 1822}


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_enumeration_counts(n):
    configs = enumerate_valid_configs(n)
    assert len(configs) == EXPECTED_COUNTS[n]
    # scenes and configs are in bijection: no two scenes share a config
    scenes = list(enumerate_scenes(n))
    assert len(scenes) == len(set(scenes)) == len(configs)


def test_enumeration_matches_validity_n3_exhaustive():
    # independent route: is_valid decodes the bit vector, enumeration builds scenes
    valid = enumerate_valid_configs(3)
    for code in range(2**9):
        bits = tuple((code >> i) & 1 for i in range(9))
        config = Configuration(bits)
        assert is_valid(config) == (config in valid)


def test_enumeration_matches_validity_n4_sampled():
    rng = random.Random(415)
    valid = enumerate_valid_configs(4)
    for _ in range(10_000):
        bits = tuple(rng.randrange(2) for _ in range(18))
        config = Configuration(bits)
        assert is_valid(config) == (config in valid)


def test_realize_is_inverse_of_extract():
    for n in (2, 3, 4):
        for scene in enumerate_scenes(n):
            assert realize_config(extract_config(scene)) == scene


def test_invalid_configurations_rejected():
    # above without close
    assert not is_valid(Configuration.from_string("000100000"))
    # above in both directions
    assert not is_valid(Configuration.from_string("100101000"))
    # chain above(red,green), above(green,blue) without above(red,blue)
    assert not is_valid(Configuration.from_string("111100100"))
    # close is not a union of cliques
    assert not is_valid(Configuration.from_string("110000000"))


def test_configuration_dimension_checks():
    with pytest.raises(DimensionError):
        Configuration.from_string("1010")  # no world has 4 predicates
    with pytest.raises(DimensionError):
        is_valid(Configuration.from_string("100100000"), n_blocks=4)
    with pytest.raises(UnsupportedWorldSizeError):
        Scene.scattered(6)


def test_legal_moves_three_scattered_singles():
    # each block: 2 JoinCluster + 2 OnTop, no AloneFar (already alone), no Bridge
    scene = Scene.scattered(3)
    moves = legal_moves(scene)
    assert len(moves) == 12
    kinds = sorted(type(m.placement).__name__ for m in moves)
    assert kinds == ["JoinCluster"] * 6 + ["OnTop"] * 6


def test_far_pair_can_stack_directly():
    # OnTop reaches across clusters: far singles -> stack in one move
    scene = Scene.scattered(2)
    after = apply_move(scene, Move(0, OnTop(1)))
    assert extract_config(after).bitstring() == "110"


def test_moves_preserve_validity_and_change_config():
    for n in (2, 3):
        for scene in enumerate_scenes(n):
            config = extract_config(scene)
            for move in legal_moves(scene):
                after = apply_move(scene, move)
                assert extract_config(after) != config
                assert is_valid(extract_config(after))


def test_move_reversibility():
    # every move can be undone by some legal move of the resulting scene
    for n in (2, 3):
        for scene in enumerate_scenes(n):
            for move in legal_moves(scene):
                after = apply_move(scene, move)
                undone = {apply_move(after, m) for m in legal_moves(after)}
                assert scene in undone


def test_move_reversibility_n4_sampled():
    rng = random.Random(97)
    scenes = sorted(enumerate_scenes(4))
    for _ in range(200):
        scene = rng.choice(scenes)
        move = rng.choice(legal_moves(scene))
        after = apply_move(scene, move)
        assert scene in {apply_move(after, m) for m in legal_moves(after)}


def test_legal_moves_deterministic_order():
    scene = Scene.of([[Stack((1, 0)), Single(2)], [Single(3)]])
    moves = legal_moves(scene)
    assert moves == legal_moves(scene)
    blocks = [m.block for m in moves]
    assert blocks == sorted(blocks)


def test_bridge_forms_pyramid():
    scene = Scene.of([[Single(1), Single(2)], [Single(0)]])
    moves = legal_moves(scene)
    bridge = [m for m in moves if isinstance(m.placement, Bridge)]
    assert bridge == [Move(0, Bridge((1, 2)))]
    after = apply_move(scene, bridge[0])
    assert extract_config(after).bitstring() == "111110000"


def test_illegal_moves_raise():
    scene = Scene.of([[Stack((1, 0))], [Single(2)]])
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(1, AloneFar()))  # green is under red, not clear
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(2, AloneFar()))  # blue is already alone and far
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(0, OnTop(0)))  # self target
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(0, OnTop(1)))  # red already sits on green
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(0, JoinCluster(5)))  # no such cluster

    pyramid = Scene.of([[Pyramid(0, (1, 2))]])
    with pytest.raises(IllegalMoveError):
        apply_move(pyramid, Move(0, OnTop(1)))  # base blocks are not clear
    stacked = Scene.of([[Stack((1, 0))], [Single(2)], [Single(3)]])
    with pytest.raises(IllegalMoveError):
        apply_move(stacked, Move(0, Bridge((2, 3))))  # targets in different clusters


def test_pyramid_top_rejects_ontop():
    scene = Scene.of([[Pyramid(0, (1, 2)), Single(3)]])
    with pytest.raises(IllegalMoveError):
        apply_move(scene, Move(3, OnTop(0)))
    assert all(
        not (isinstance(m.placement, OnTop) and m.placement.target == 0)
        for m in legal_moves(scene)
    )


def test_all_legal_moves_apply_cleanly():
    for scene in enumerate_scenes(3):
        for move in legal_moves(scene):
            apply_move(scene, move)  # must not raise


def test_scene_json_round_trip():
    for scene in enumerate_scenes(3):
        assert Scene.from_json(scene.to_json()) == scene


def test_scene_canonical_form():
    a = Scene.of([[Single(2)], [Stack((1, 0))]])
    b = Scene.of([[Stack((1, 0))], [Single(2)]])
    assert a == b
    assert hash(a) == hash(b)
