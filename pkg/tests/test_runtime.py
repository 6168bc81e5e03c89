import json

import pytest

from intentsim.parser import parse_clause, parse_program
from intentsim.runtime import (
    AddEffect,
    AssertClause,
    NoCycleYet,
    ReadOnlyViolation,
    RemoveEffect,
    RetractClause,
    SetProperty,
    Simulation,
    UnknownClass,
    UnknownProperty,
    UnknownTarget,
    ValidationError,
)
from intentsim.session import report_line

from conftest import PREY_SRC, cat_with_scenario

SAFE_SCENARIO = "scenario {\n  world 10 x 10\n  seed 42\n  spawn cat cat1 at (2, 2)\n  thing dog at (9, 9)\n}\n"
TRAPPED_SCENARIO = "scenario {\n  world 10 x 10\n  seed 42\n  spawn cat cat1 at (4, 4)\n  thing dog at (4, 4)\n}\n"


def load(src, **kw):
    return Simulation.load(parse_program(src), **kw)


def safe_cat(**kw):
    return load(cat_with_scenario(SAFE_SCENARIO), **kw)


def trapped_cat(**kw):
    # the dog shares the cat's cell; move_away cannot help, danger stays true
    return load(cat_with_scenario(TRAPPED_SCENARIO), **kw)


# --- spawn -------------------------------------------------------------------


def test_spawn_uses_declared_initials():
    sim = safe_cat()
    props = sim.agents["cat1"].store.snapshot()
    assert props == {"danger": False, "sexAppeal": 0, "energy": 100}


def test_spawn_unknown_class():
    sim = safe_cat()
    with pytest.raises(UnknownClass):
        sim.spawn_agent("unicorn")


def test_spawn_override():
    sim = safe_cat()
    name = sim.spawn_agent("cat", overrides={"energy": 5})
    assert sim.agents[name].store.read("energy") == 5


def test_spawn_override_unknown_property():
    sim = safe_cat()
    with pytest.raises(UnknownProperty):
        sim.spawn_agent("cat", overrides={"wings": 2})


def test_spawn_auto_names():
    sim = safe_cat()
    assert sim.spawn_agent("cat") == "cat2"
    assert sim.spawn_agent("cat") == "cat3"


# --- tick / decision ------------------------------------------------------------


def test_safe_cat_eats_directly():
    rep = safe_cat().tick()
    a = rep["agents"]["cat1"]
    assert a["cycle_completed"]
    assert a["direct"] == ["eat"]
    assert a["solved"] == []
    assert a["intentions"] == []
    assert a["actions_run"] == ["eat"]


def test_endangered_cat_selects_run():
    rep = trapped_cat().tick()
    a = rep["agents"]["cat1"]
    assert a["direct"] == []
    assert a["intentions"] == [["reduce", "danger"]]
    assert a["blocked"] == [["danger", "required-false"]]
    assert a["solved"] == ["run"]
    assert a["actions_run"] == ["run"]


def test_two_runs_identical_reports():
    lines_a = [report_line(r) for r in _run(trapped_cat(), 10)]
    lines_b = [report_line(r) for r in _run(trapped_cat(), 10)]
    assert lines_a == lines_b


def _run(sim, n):
    return [sim.tick() for _ in range(n)]


def test_prey_predator_loop_runs():
    sim = load(PREY_SRC)
    reports = _run(sim, 30)
    stalked = any("stalk" in r["agents"]["pr1"]["solved"] for r in reports)
    assert stalked
    # predator intention channel: blocked preyNear -> increase preyNear
    wanted = any(
        ["increase", "preyNear"] in r["agents"]["pr1"]["intentions"] for r in reports
    )
    assert wanted


# --- read_property / perception-on-demand ------------------------------------------


def test_consult_triggers_stale_perception():
    sim = safe_cat()
    agent = sim.agents["cat1"]
    sim.tick_index = 7
    agent.store._ticks["danger"] = 3  # stale write
    value = sim.read_property("cat1", "danger")
    assert agent.perception_counts["lookAround"] == 1
    assert value is False  # dog is 7 cells away


def test_consult_twice_runs_once():
    sim = safe_cat()
    sim.tick_index = 1
    sim.read_property("cat1", "danger")
    sim.read_property("cat1", "danger")
    assert sim.agents["cat1"].perception_counts["lookAround"] == 1


def test_consult_unprovided_property_reads_store():
    sim = safe_cat()
    sim.tick_index = 5
    assert sim.read_property("cat1", "energy") == 100
    assert sim.agents["cat1"].perception_counts["lookAround"] == 0


def test_unknown_property_read():
    sim = safe_cat()
    with pytest.raises(UnknownProperty):
        sim.read_property("cat1", "wings")


def test_scheduled_perception_every_n():
    src = cat_with_scenario(
        "scenario {\n  world 10 x 10\n  seed 1\n  spawn cat cat1 at (2, 2)\n"
        "  every 3 cat.lookAround\n}\n"
    )
    sim = load(src)
    for _ in range(9):
        sim.tick()
    # on demand each tick anyway (danger is consulted by the rules); the
    # schedule must not double-run it
    assert sim.agents["cat1"].perception_counts["lookAround"] == 9


# --- edits ----------------------------------------------------------------------


def test_add_effect_changes_next_selection():
    sim = trapped_cat()
    sim.tick()
    sim.queue_edit("cat1", AddEffect("mew", "reduce", "danger"))
    rep = sim.tick()
    assert rep["agents"]["cat1"]["solved"] == ["mew", "run"]


def test_retract_main_stops_direct_actions():
    sim = safe_cat()
    assert sim.tick()["agents"]["cat1"]["direct"] == ["eat"]
    sim.queue_edit("cat1", RetractClause(parse_clause("main :- eat.")))
    rep = sim.tick()
    a = rep["agents"]["cat1"]
    assert a["direct"] == []
    assert a["main_status"] == "failed"


def test_set_property_visible_to_next_consultations():
    sim = safe_cat()
    sim.queue_edit("cat1", SetProperty("danger", True))
    rep = sim.tick()
    a = rep["agents"]["cat1"]
    # written at this tick's safe point: fresh, so lookAround must not overwrite
    assert a["solved"] == ["run"]
    assert a["perceptions_run"] == []
    assert sim.agents["cat1"].store.read("danger") is True


def test_edit_validation():
    sim = safe_cat()
    with pytest.raises(UnknownTarget):
        sim.queue_edit("nobody", SetProperty("danger", True))
    with pytest.raises(ValidationError):
        sim.queue_edit("cat1", SetProperty("danger", 3))  # boolean property
    with pytest.raises(ValidationError):
        sim.queue_edit("cat1", AddEffect("mew", "grow", "danger"))
    with pytest.raises(ValidationError):
        sim.queue_edit("cat1", AddEffect("mew", "reduce", "wings"))
    with pytest.raises(ValidationError):
        sim.queue_edit("cat1", AddEffect("mew", "reduce", "sexAppeal"))  # duplicate pair
    with pytest.raises(ValidationError):
        sim.queue_edit("cat1", AssertClause(parse_clause("danger.")))  # property head


def test_remove_effect():
    sim = trapped_cat()
    sim.queue_edit("cat1", RemoveEffect("run", "danger"))
    rep = sim.tick()
    assert rep["agents"]["cat1"]["solved"] == []


def test_edit_isolation_between_agents():
    sim = trapped_cat()
    sim.spawn_agent("cat", "cat2", pos=(4, 4))
    sim.queue_edit("cat1", AddEffect("mew", "reduce", "danger"))
    rep = sim.tick()
    assert rep["agents"]["cat1"]["solved"] == ["mew", "run"]
    assert rep["agents"]["cat2"]["solved"] == ["run"]
    assert sim.agents["cat2"].annotations["mew"] == list(sim.classes["cat"].action("mew").effects)


def test_class_edit_fans_out_except_diverged():
    sim = trapped_cat()
    sim.spawn_agent("cat", "cat2", pos=(4, 4))
    # cat2 diverges on mew first
    sim.queue_edit("cat2", AddEffect("mew", "independent", "danger"))
    sim.tick()
    sim.queue_edit("cat", AddEffect("mew", "reduce", "danger"))
    rep = sim.tick()
    assert rep["agents"]["cat1"]["solved"] == ["mew", "run"]  # class edit reached cat1
    assert rep["agents"]["cat2"]["solved"] == ["run"]  # cat2 kept its local value
    # future spawns see the class-level annotation
    name = sim.spawn_agent("cat", pos=(4, 4))
    rep2 = sim.tick()
    assert rep2["agents"][name]["solved"] == ["mew", "run"]


def test_class_assert_clause_fans_out():
    sim = safe_cat()
    sim.queue_edit("cat", AssertClause(parse_clause("main :- mew.")))
    rep = sim.tick()
    assert rep["agents"]["cat1"]["direct"] == ["eat"]
    assert len(sim.agents["cat1"].db.matching(("main", 0))) == 2


def test_failed_retract_recorded_not_fatal():
    sim = safe_cat()
    sim.queue_edit("cat1", RetractClause(parse_clause("sleep :- dream.")))
    rep = sim.tick()
    (edit,) = rep["edits"]
    assert edit["ok"] is False
    assert "sleep" in edit["error"]
    assert rep["agents"]["cat1"]["cycle_completed"]


# --- read-only decision --------------------------------------------------------------


def test_decision_context_write_raises():
    sim = safe_cat()
    store = sim.agents["cat1"].store
    with store.context("decision"):
        with pytest.raises(ReadOnlyViolation):
            store.write("danger", True, 1)


def test_version_unchanged_when_no_perception_fires():
    sim = safe_cat()
    sim.tick()  # lookAround ran, danger fresh for tick 1
    agent = sim.agents["cat1"]
    # consult again within the same tick: no perception, no writes
    version = agent.store.version
    sim.read_property("cat1", "danger")
    assert agent.store.version == version


def test_decision_writes_only_from_perceptions():
    sim = trapped_cat()
    for _ in range(20):
        sim.tick()  # would raise ReadOnlyViolation on any decision write


# --- action bodies ---------------------------------------------------------------------


def test_body_runtime_error_contained():
    src = (
        "agent diva {\n"
        "  property fame = 1\n"
        "  rules { main :- sing. sing. }\n"
        "  action sing { self.fame = self.fame / 0 }\n"
        "}\n"
        "scenario { world 4 x 4 seed 1 spawn diva d1 at (0, 0) }\n"
    )
    sim = load(src)
    rep = sim.tick()
    a = rep["agents"]["d1"]
    assert a["actions_run"] == ["sing"]
    assert any("division by zero" in e for e in a["errors"])
    rep2 = sim.tick()  # simulation continues
    assert rep2["tick"] == 2


def test_action_type_error_contained():
    src = (
        "agent oddball {\n"
        "  property mood = true\n"
        "  rules { main :- act. act. }\n"
        "  action act { self.mood = 42 }\n"
        "}\n"
        "scenario { world 4 x 4 seed 1 spawn oddball o1 at (0, 0) }\n"
    )
    rep = load(src).tick()
    assert any("mood" in e for e in rep["agents"]["o1"]["errors"])


# --- budget / liveness -------------------------------------------------------------------


def test_cycle_completes_under_budget_slicing():
    # with budget 1 the safe cat needs several ticks per cycle but still eats
    sim = safe_cat(budget=1)
    reports = _run(sim, 30)
    completed = [r for r in reports if r["agents"]["cat1"]["cycle_completed"]]
    assert completed
    assert completed[0]["agents"]["cat1"]["direct"] == ["eat"]
    # steps per tick never exceed the budget
    assert all(r["agents"]["cat1"]["steps"] <= 1 for r in reports)


def test_one_cycle_per_tick():
    sim = safe_cat()  # budget 200 >> proof size
    rep = sim.tick()
    assert rep["agents"]["cat1"]["actions_run"].count("eat") == 1


# --- explain -----------------------------------------------------------------------------


def test_explain_before_any_cycle():
    sim = safe_cat()
    with pytest.raises(NoCycleYet):
        sim.explain("cat1")


def test_explain_names_the_evidence():
    sim = trapped_cat()
    sim.tick()
    text = sim.explain("cat1").to_text()
    assert "danger" in text
    assert "eat :- not(danger)." in text
    assert "run" in text


def test_explain_empty_ruleset():
    src = "agent husk { }\nscenario { world 4 x 4 seed 1 spawn husk h1 at (0, 0) }\n"
    sim = load(src)
    sim.tick()
    exp = sim.explain("h1")
    assert exp.main_status == "failed"
    assert exp.intentions == []
    assert "unprovable" in exp.to_text()


def test_explain_after_mew_edit_lists_both():
    sim = trapped_cat()
    sim.tick()
    sim.queue_edit("cat1", AddEffect("mew", "reduce", "danger"))
    sim.tick()
    exp = sim.explain("cat1")
    assert set(exp.selection.solved) == {"mew", "run"}
    assert exp.selection.served["mew"][0].key() == ("reduce", "danger")
    assert exp.selection.served["run"][0].key() == ("reduce", "danger")
    text = exp.to_text()
    assert "mew selected because intention reduce danger" in text


def test_explanation_serializes():
    sim = trapped_cat()
    sim.tick()
    blob = json.dumps(sim.explain("cat1").to_json())
    assert "required-false" in blob


# --- report / trace shape ------------------------------------------------------------------


def test_report_is_json_stable():
    rep = safe_cat().tick()
    assert json.loads(report_line(rep)) == rep


def test_report_contains_deltas():
    rep = trapped_cat().tick()
    deltas = rep["agents"]["cat1"]["deltas"]
    assert deltas["danger"] == [False, True]


def test_dead_agent_skipped():
    sim = load(PREY_SRC)
    prey = sim.agents["p1"]
    sim.world.entity(prey.entity_id).alive = False
    rep = sim.tick()
    assert rep["agents"]["p1"]["alive"] is False
    assert rep["agents"]["p1"]["steps"] == 0


# --- scenario loading edge cases -----------------------------------------------------


def test_scenario_unknown_class_rejected():
    with pytest.raises(ValidationError):
        load("agent a { }\nscenario { spawn unicorn u1 at (0, 0) }")


def test_program_without_scenario_gets_empty_world():
    sim = load("agent a { }")
    assert sim.agents == {}
    assert (sim.world.width, sim.world.height) == (16, 16)
    assert sim.tick()["entities"] == []


def test_scenario_schedule_validated():
    with pytest.raises(ValidationError):
        load("agent a { }\nscenario { every 2 a.ghost }")


def test_two_agents_byte_identical_runs():
    lines_a = [report_line(r) for r in _run(load(PREY_SRC), 20)]
    lines_b = [report_line(r) for r in _run(load(PREY_SRC), 20)]
    assert lines_a == lines_b


def test_edit_lands_mid_cycle_under_budget_slicing():
    # budget 2: the trapped cat's cycle spans several ticks; an edit queued
    # while the proof is suspended restarts the cycle at the next safe point
    sim = trapped_cat(budget=2)
    first = sim.tick()["agents"]["cat1"]
    assert not first["cycle_completed"]  # proof needs more than 2 steps
    sim.tick()
    sim.queue_edit("cat1", AddEffect("mew", "reduce", "danger"))
    solved = None
    for _ in range(12):
        rep = sim.tick()["agents"]["cat1"]
        if rep["cycle_completed"]:
            solved = rep["solved"]
            break
    assert solved == ["mew", "run"]


# --- intend enumeration edge cases ------------------------------------------------------


def test_intend_cap_flags_truncation():
    facts = "\n".join(f"    intend(increase, p{i})." for i in range(5))
    props = "\n".join(f"  property p{i} = 0" for i in range(5))
    src = (
        "agent wisher {\n" + props + "\n  rules {\n    main :- done.\n" + facts +
        "\n  }\n}\n"
        "scenario { world 4 x 4 seed 1 spawn wisher w1 at (0, 0) }\n"
    )
    sim = load(src, intend_cap=3)
    rep = sim.tick()["agents"]["w1"]
    assert rep["cycle_completed"]
    assert rep["intend_truncated"] is True
    assert len(rep["intentions"]) == 3


def test_invalid_tendency_contained_in_tick():
    src = (
        "agent confused {\n  property mood = 0\n"
        "  rules {\n    main :- ok.\n    intend(grow, mood).\n    intend(increase, mood).\n  }\n"
        "  action cheer ensure: increase mood { }\n}\n"
        "scenario { world 4 x 4 seed 1 spawn confused c1 at (0, 0) }\n"
    )
    sim = load(src)
    rep = sim.tick()["agents"]["c1"]
    assert rep["cycle_completed"]
    assert any("grow" in e for e in rep["errors"])  # logged, not fatal
    assert rep["intentions"] == [["increase", "mood"]]  # the valid one survived
    assert rep["solved"] == ["cheer"]


def test_duplicate_intend_proofs_collapse():
    src = (
        "agent eager {\n  property mood = 0\n"
        "  rules {\n    main :- go.\n"
        "    intend(increase, mood) :- a.\n    intend(increase, mood) :- b.\n"
        "    a.\n    b.\n  }\n"
        "  action cheer ensure: increase mood { }\n}\n"
        "scenario { world 4 x 4 seed 1 spawn eager e1 at (0, 0) }\n"
    )
    rep = load(src, intend_cap=2).tick()["agents"]["e1"]
    assert rep["intentions"] == [["increase", "mood"]]
    assert rep["intend_truncated"] is False  # two proofs, one intention
