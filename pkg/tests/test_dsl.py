import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intentsim import ast
from intentsim.parser import ParseError, ValidationError, parse_program, parse_query
from intentsim.pretty import class_text, program_text
from intentsim.terms import Atom, Clause, Literal, Num, Struct, Var

from conftest import CAT_SRC, PREY_SRC


# --- parse_program ------------------------------------------------------------


def test_cat_program_shape(cat_program):
    assert len(cat_program.classes) == 1
    cat = cat_program.classes[0]
    assert cat.name == "cat"
    assert len(cat.rules) == 2
    assert len(cat.perceptions) == 1
    assert len(cat.actions) == 3
    assert cat.rules[0] == Clause(Atom("main"), (Literal(Atom("eat")),))
    assert cat.rules[1] == Clause(Atom("eat"), (Literal(Atom("danger"), negated=True),))
    look = cat.perceptions[0]
    assert look.name == "lookAround" and look.provides == ("danger",)
    run = cat.action("run")
    assert run.effects == (ast.EffectAnnotation("reduce", "danger"),)
    mew = cat.action("mew")
    assert mew.effects == (ast.EffectAnnotation("increase", "sexAppeal"),)


def test_empty_agent():
    prog = parse_program("agent empty { }")
    (cls,) = prog.classes
    assert cls.name == "empty"
    assert cls.properties == ()
    assert cls.perceptions == ()
    assert cls.actions == ()
    assert cls.rules == ()


def test_unknown_tendency_is_validation_error():
    with pytest.raises(ValidationError) as exc:
        parse_program("agent bird { property altitude = 0\n"
                      "  action fly ensure: grow altitude { } }")
    assert "grow" in str(exc.value)
    assert exc.value.line == 2


def test_property_atoms_flagged(cat_program):
    assert cat_program.classes[0].property_atoms == frozenset({"danger"})


def test_multiple_effects_comma_list():
    prog = parse_program(
        "agent cat { property danger = false\n property sexAppeal = 0\n"
        "  action mew ensure: increase sexAppeal, reduce danger { } }"
    )
    mew = prog.classes[0].action("mew")
    assert mew.effects == (
        ast.EffectAnnotation("increase", "sexAppeal"),
        ast.EffectAnnotation("reduce", "danger"),
    )


def test_scenario_block(cat_program):
    sc = cat_program.scenario
    assert (sc.width, sc.height, sc.seed) == (10, 10, 42)
    assert sc.instances[0].class_name == "cat"
    assert sc.instances[0].name == "cat1"
    assert sc.instances[0].pos == (2, 2)
    assert sc.things[0].kind == "dog" and sc.things[0].pos == (5, 5)
    assert sc.things[1].kind == "food" and sc.things[1].count == 4


# --- validation ----------------------------------------------------------------


@pytest.mark.parametrize(
    "source,fragment",
    [
        ("agent a { property x = 1\n property x = 2 }", "duplicate property"),
        ("agent a { action go { }\n action go { } }", "duplicate method"),
        ("agent a { property go = 1\n action go { } }", "collides with a property"),
        ("agent a { perception see provide: ghost { } }", "undeclared property"),
        ("agent a { action go ensure: reduce ghost { } }", "undeclared property"),
        (
            "agent a { property x = 1\n action go ensure: reduce x, increase x { } }",
            "two effects",
        ),
        (
            "agent a { property x = 1\n property y = 2\n"
            "  perception see provide: x { self.y = 2 } }",
            "not in its provide list",
        ),
        ("agent a { property x = 1\n rules { x :- y. } }", "names a property"),
        ("agent a { rules { getProperty(a, b). } }", "reserved"),
        ("agent a { action go { self.ghost = 1 } }", "undeclared property"),
        ("agent a { } agent a { }", "duplicate agent class"),
    ],
)
def test_validation_errors(source, fragment):
    with pytest.raises(ValidationError) as exc:
        parse_program(source)
    assert fragment in str(exc.value)


def test_syntax_errors_carry_position():
    with pytest.raises(ParseError) as exc:
        parse_program("agent a {\n  property = 3\n}")
    assert exc.value.line == 2
    assert exc.value.col > 0
    assert not isinstance(exc.value, ValidationError)


# --- parse_query ----------------------------------------------------------------


def test_parse_query_intend():
    (lit,) = parse_query("intend(T, P)")
    assert not lit.negated
    assert lit.term == Struct("intend", (Var("T"), Var("P")))


def test_parse_query_negated_atom():
    (lit,) = parse_query("not(danger)")
    assert lit.negated
    assert lit.term == Atom("danger")


def test_parse_query_malformed():
    with pytest.raises(ParseError):
        parse_query("foo(,)")


def test_parse_query_conjunction():
    lits = parse_query("getProperty(energy, E), lt(E, 30).")
    assert len(lits) == 2


# --- pretty-print round trips ------------------------------------------------------


@pytest.mark.parametrize("source", [CAT_SRC, PREY_SRC, "agent empty { }"])
def test_round_trip_corpus(source):
    prog = parse_program(source)
    assert parse_program(program_text(prog)) == prog


def test_parser_is_pure():
    assert parse_program(CAT_SRC) == parse_program(CAT_SRC)


# --- generated round trips -----------------------------------------------------------

_props = st.sampled_from(["alpha", "beta", "gamma"])
_preds = st.sampled_from(["foo", "bar", "baz"])
_actions = st.sampled_from(["go", "halt", "leap"])
_consts = st.sampled_from(["a", "b", "it"])
_vars = st.sampled_from(["X", "Y", "Z"])
_tendencies = st.sampled_from(ast.TENDENCIES)


def _terms(depth):
    leaf = st.one_of(
        _consts.map(Atom),
        _vars.map(Var),
        st.integers(-20, 20).map(Num),
    )
    if depth == 0:
        return leaf
    return st.one_of(
        leaf,
        st.builds(
            lambda name, args: Struct(name, tuple(args)),
            _preds,
            st.lists(_terms(depth - 1), min_size=1, max_size=2),
        ),
    )


_literals = st.builds(
    Literal,
    st.one_of(_preds.map(Atom), _terms(1).filter(lambda t: isinstance(t, Struct))),
    st.booleans(),
)

_clauses = st.builds(
    Clause,
    st.one_of(_preds.map(Atom), st.builds(lambda a: Struct("foo", (a,)), _terms(0))),
    st.lists(_literals, max_size=3).map(tuple),
)

_values = st.one_of(
    st.booleans(),
    st.integers(-50, 50),
    st.sampled_from(["warm", "cold"]),
)

_exprs = st.recursive(
    st.one_of(
        st.integers(-9, 9).map(ast.NumLit),
        st.booleans().map(ast.BoolLit),
        st.sampled_from(["warm", "it"]).map(ast.SymLit),
        _props.map(ast.PropRead),
    ),
    lambda inner: st.one_of(
        st.builds(ast.Unary, st.sampled_from(["-", "not"]), inner),
        st.builds(ast.Binary, st.sampled_from(["+", "*", "<=", "and", "or"]), inner, inner),
        st.builds(lambda args: ast.Call("ping", tuple(args)), st.lists(inner, max_size=2)),
    ),
    max_leaves=6,
)

_stmts = st.recursive(
    st.one_of(
        st.builds(lambda p, e: ast.Assign(p, e), _props, _exprs),
        st.builds(lambda c: ast.CallStmt(c), st.builds(lambda a: ast.Call("ping", tuple(a)), st.lists(_exprs, max_size=2))),
    ),
    lambda inner: st.builds(
        lambda c, t, o: ast.If(c, tuple(t), tuple(o)),
        _exprs,
        st.lists(inner, max_size=2),
        st.lists(inner, max_size=2),
    ),
    max_leaves=5,
)


@st.composite
def _agent_classes(draw):
    # declare the whole property pool so generated assignments always validate
    props = tuple(ast.PropertyDecl(name, draw(_values)) for name in ("alpha", "beta", "gamma"))
    rules = tuple(draw(st.lists(_clauses, max_size=4)))
    perceptions = tuple(
        ast.PerceptionDecl("see", ("alpha",), (ast.Assign("alpha", draw(_exprs)),))
        for _ in range(draw(st.integers(0, 1)))
    )
    n_actions = draw(st.integers(0, 2))
    actions = tuple(
        ast.ActionDecl(
            name,
            tuple(
                ast.EffectAnnotation(draw(_tendencies), prop)
                for prop in sorted(draw(st.sets(_props, max_size=2)))
            ),
            tuple(draw(st.lists(_stmts, max_size=2))),
        )
        for name in ["go", "halt"][:n_actions]
    )
    cls = ast.AgentClass("critter", props, perceptions, actions, rules)
    from intentsim.parser import validate_class

    return validate_class(cls)


@settings(max_examples=30, deadline=None)
@given(_agent_classes())
def test_round_trip_generated(cls):
    text = class_text(cls)
    reparsed = parse_program(text)
    assert reparsed.classes == (cls,)
