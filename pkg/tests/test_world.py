import pytest

from intentsim.body import BodyRuntimeError
from intentsim.world import INF, ArityError, UnknownBuiltin, WorldState


def small_world():
    w = WorldState(10, 10, seed=1)
    me = w.add_entity("cat", (2, 2))
    dog = w.add_entity("dog", (5, 5))
    return w, me, dog


def test_nearest_chebyshev():
    w, me, _ = small_world()
    assert w.eval_builtin("nearest", ["dog"], me) == 3  # max(|5-2|, |5-2|)


def test_nearest_none_is_inf():
    w, me, _ = small_world()
    assert w.eval_builtin("nearest", ["fox"], me) == INF


def test_nearest_tie_smaller_id():
    w = WorldState(10, 10)
    me = w.add_entity("cat", (5, 5))
    d1 = w.add_entity("dog", (3, 3))
    d2 = w.add_entity("dog", (7, 7))
    assert w.distance(w.entity(me), w.entity(d1)) == w.distance(w.entity(me), w.entity(d2))
    w.eval_builtin("move_toward", ["dog"], me)
    assert (w.entity(me).x, w.entity(me).y) == (4, 4)  # stepped toward d1


def test_move_away_clamped_at_edge():
    w = WorldState(10, 10)
    me = w.add_entity("cat", (0, 0))
    w.add_entity("dog", (3, 3))
    w.eval_builtin("move_away", ["dog"], me)
    assert (w.entity(me).x, w.entity(me).y) == (0, 0)


def test_move_toward_one_cell_diagonal():
    w, me, _ = small_world()
    w.eval_builtin("move_toward", ["dog"], me)
    assert (w.entity(me).x, w.entity(me).y) == (3, 3)


def test_consume_requires_adjacency():
    w = WorldState(10, 10)
    me = w.add_entity("cat", (2, 2))
    food_far = w.add_entity("food", (6, 6))
    assert w.eval_builtin("consume", ["food"], me) is False
    assert w.entity(food_far).alive
    food_near = w.add_entity("food", (3, 2))
    assert w.eval_builtin("consume", ["food"], me) is True
    assert not w.entity(food_near).alive
    # dead entities are invisible to nearest
    assert w.eval_builtin("nearest", ["food"], me) == 4


def test_distance_to_missing_is_inf():
    w, me, dog = small_world()
    assert w.eval_builtin("distance_to", [dog], me) == 3
    assert w.eval_builtin("distance_to", [999], me) == INF


def test_random_stream_seeded():
    a = WorldState(5, 5, seed=9)
    b = WorldState(5, 5, seed=9)
    ea = a.add_entity("cat", (0, 0))
    eb = b.add_entity("cat", (0, 0))
    xs = [a.eval_builtin("random", [], ea) for _ in range(5)]
    ys = [b.eval_builtin("random", [], eb) for _ in range(5)]
    assert xs == ys


def test_random_placement_seeded():
    a = WorldState(8, 8, seed=3)
    b = WorldState(8, 8, seed=3)
    pa = [a.add_entity("food") for _ in range(5)]
    pb = [b.add_entity("food") for _ in range(5)]
    assert [(a.entity(e).x, a.entity(e).y) for e in pa] == [
        (b.entity(e).x, b.entity(e).y) for e in pb
    ]


def test_unknown_builtin_and_arity():
    w, me, _ = small_world()
    with pytest.raises(UnknownBuiltin):
        w.eval_builtin("teleport", [], me)
    with pytest.raises(ArityError):
        w.eval_builtin("nearest", [], me)
    with pytest.raises(BodyRuntimeError):
        w.eval_builtin("nearest", [42], me)


def test_out_of_bounds_placement_rejected():
    w = WorldState(4, 4)
    with pytest.raises(ValueError):
        w.add_entity("cat", (4, 0))
